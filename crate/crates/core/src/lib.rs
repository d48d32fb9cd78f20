//! q-deformed exponential functions, their logarithms, zero sum rules and
//! the zero/turning-point geometry that shapes the inverse map.

// `!(x > 0.0)` style guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// index loops mirror the recurrences they implement
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod combinatorics;
pub mod error;
mod precise;
pub mod qlog;
pub mod qnum;
pub mod sum;
pub mod sumrules;
pub mod zeroscape;

pub use error::{QError, Result};
pub use qnum::{
    bracket, bracket_factorial, eval_series, Convention, Family, FunctionSpec, QParam, Series,
    SeriesConfig, TruncatedValue, set_default_term_cap,
};
