//! Deformed integers `[n]`, their factorials, and truncated evaluation of the
//! q-exponential family of entire functions.
//!
//! Two bracket conventions are supported:
//!
//! ```text
//! Symmetric  [n]   = (q^{n/2} - q^{-n/2}) / (q^{1/2} - q^{-1/2})
//! Jackson    [n]_J = (1 - q^n) / (1 - q)  = q^{(n-1)/2} [n]
//! ```
//!
//! Every series is summed term by term from a ratio recurrence, so no
//! intermediate power of `z` is ever formed. For every family the term ratio
//! admits a non-increasing majorant, which turns the first omitted term into a
//! rigorous geometric bound on the discarded tail.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{OnceLock, PoisonError, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QError, Result};
use crate::sum::ComplexNeumaier;

/// Largest index accepted by [`bracket_factorial`]; guards the cache size.
pub const MAX_FACTORIAL_INDEX: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Symmetric,
    Jackson,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Convention::Symmetric => f.write_str("symmetric"),
            Convention::Jackson => f.write_str("jackson"),
        }
    }
}

/// Deformation parameter together with its bracket convention.
///
/// Symmetric brackets are invariant under `q -> 1/q`, so values above one are
/// stored as their reciprocal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QParam {
    q: f64,
    convention: Convention,
}

impl QParam {
    pub fn new(q: f64, convention: Convention) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) {
            return Err(QError::InvalidArgument(format!(
                "q must be a positive finite number, got {q}"
            )));
        }
        let q = match convention {
            Convention::Symmetric if q > 1.0 => 1.0 / q,
            _ => q,
        };
        Ok(Self { q, convention })
    }

    pub fn symmetric(q: f64) -> Result<Self> {
        Self::new(q, Convention::Symmetric)
    }

    pub fn jackson(q: f64) -> Result<Self> {
        Self::new(q, Convention::Jackson)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn is_classical(&self) -> bool {
        self.q == 1.0
    }

    /// Same convention, different `q`.
    pub fn with_q(&self, q: f64) -> Result<Self> {
        Self::new(q, self.convention)
    }

    /// Radius of convergence of the series, `None` when they are entire.
    pub fn convergence_radius(&self) -> Option<f64> {
        match self.convention {
            Convention::Jackson if self.q < 1.0 => Some(1.0 / (1.0 - self.q)),
            _ => None,
        }
    }
}

/// Bracket value that may be `+inf` when binary64 overflows.
pub(crate) fn bracket_raw(n: u64, qp: QParam) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let q = qp.q;
    if q == 1.0 {
        return n as f64;
    }
    let n = n as f64;
    match qp.convention {
        Convention::Symmetric => {
            let half_log = 0.5 * q.ln();
            (n * half_log).sinh() / half_log.sinh()
        }
        Convention::Jackson => {
            let log = q.ln();
            (n * log).exp_m1() / log.exp_m1()
        }
    }
}

/// The deformed integer `[n]` (or `[n]_J`).
pub fn bracket(n: u64, qp: QParam) -> Result<f64> {
    let value = bracket_raw(n, qp);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(QError::Overflow { n, q: qp.q })
    }
}

type FactorialCache = RwLock<HashMap<(u64, Convention), Vec<f64>>>;

fn factorial_cache() -> &'static FactorialCache {
    static CACHE: OnceLock<FactorialCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `[n]! = [n][n-1]...[1]`, with `[0]! = 1`.
///
/// Values are accumulated cumulatively and cached per `(q, convention)`.
pub fn bracket_factorial(n: u64, qp: QParam) -> Result<f64> {
    if n > MAX_FACTORIAL_INDEX {
        return Err(QError::IndexOutOfRange(format!(
            "factorial index {n} exceeds {MAX_FACTORIAL_INDEX}"
        )));
    }
    let key = (qp.q.to_bits(), qp.convention);
    let idx = n as usize;
    {
        let cache = factorial_cache()
            .read()
            .unwrap_or_else(PoisonError::into_inner);
        if let Some(&v) = cache.get(&key).and_then(|table| table.get(idx)) {
            return Ok(v);
        }
    }
    let mut cache = factorial_cache()
        .write()
        .unwrap_or_else(PoisonError::into_inner);
    let table = cache.entry(key).or_insert_with(|| vec![1.0]);
    while table.len() <= idx {
        let k = table.len() as u64;
        let next = table[table.len() - 1] * bracket_raw(k, qp);
        if !next.is_finite() {
            return Err(QError::Overflow { n: k, q: qp.q });
        }
        table.push(next);
    }
    Ok(table[idx])
}

/// Which entire function of the family is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `e_q(z) = sum z^n / [n]!`
    Exp,
    /// `cos_q(z) = sum (-1)^n z^{2n} / [2n]!`
    Cos,
    /// `sin_q(z) = sum (-1)^n z^{2n+1} / [2n+1]!`
    Sin,
    /// r-th derivative of `e_q`.
    ExpDerivative(u32),
    /// r-th integral of `e_q` with all integration constants set to zero.
    ExpIntegral(u32),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Exp => f.write_str("exp"),
            Family::Cos => f.write_str("cos"),
            Family::Sin => f.write_str("sin"),
            Family::ExpDerivative(r) => write!(f, "exp-derivative({r})"),
            Family::ExpIntegral(r) => write!(f, "exp-integral({r})"),
        }
    }
}

impl Family {
    /// Degree of the m-th (possibly) nonzero term.
    pub fn degree(self, m: u64) -> u64 {
        match self {
            Family::Exp | Family::ExpDerivative(_) => m,
            Family::ExpIntegral(r) => m + r as u64,
            Family::Cos => 2 * m,
            Family::Sin => 2 * m + 1,
        }
    }

    /// Degree increment between consecutive terms.
    pub fn step(self) -> u64 {
        match self {
            Family::Cos | Family::Sin => 2,
            _ => 1,
        }
    }

    /// Coefficient of the first term.
    pub fn leading_coefficient(self, qp: QParam) -> f64 {
        match self {
            Family::Exp | Family::Cos | Family::Sin => 1.0,
            Family::ExpDerivative(r) => (1..=r as u64)
                .map(|k| k as f64 / bracket_raw(k, qp))
                .product(),
            Family::ExpIntegral(r) => (1..=r as u64).map(|k| 1.0 / k as f64).product(),
        }
    }

    /// `a_m / a_{m-1}` for `m >= 1`.
    pub fn coefficient_ratio(self, m: u64, qp: QParam) -> f64 {
        debug_assert!(m >= 1);
        let b = |n| bracket_raw(n, qp);
        let mf = m as f64;
        match self {
            Family::Exp => 1.0 / b(m),
            Family::ExpDerivative(r) => {
                let r = r as u64;
                (m + r) as f64 / (mf * b(m + r))
            }
            Family::ExpIntegral(r) => mf / ((m + r as u64) as f64 * b(m)),
            Family::Cos => -1.0 / (b(2 * m - 1) * b(2 * m)),
            Family::Sin => -1.0 / (b(2 * m) * b(2 * m + 1)),
        }
    }

    /// Upper bound on `|a_j / a_{j-1}|` for every `j >= m`.
    ///
    /// Brackets are non-decreasing in `n` for both conventions, which makes
    /// each expression below non-increasing in `m`.
    fn ratio_majorant(self, m: u64, qp: QParam) -> f64 {
        match self {
            Family::ExpIntegral(_) => 1.0 / bracket_raw(m, qp),
            _ => self.coefficient_ratio(m, qp).abs(),
        }
    }

    /// Coefficient `a_m` by direct product of ratios.
    pub fn coefficient(self, m: u64, qp: QParam) -> f64 {
        (1..=m).fold(self.leading_coefficient(qp), |a, j| {
            a * self.coefficient_ratio(j, qp)
        })
    }
}

/// A member of the function family at a given deformation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub family: Family,
    pub qp: QParam,
}

impl FunctionSpec {
    pub fn new(family: Family, qp: QParam) -> Self {
        Self { family, qp }
    }

    pub fn exp(qp: QParam) -> Self {
        Self::new(Family::Exp, qp)
    }

    pub fn with_q(&self, q: f64) -> Result<Self> {
        Ok(Self::new(self.family, self.qp.with_q(q)?))
    }
}

/// Value of a truncated series with a bound on the discarded tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedValue {
    pub value: Complex64,
    /// Upper bound on the modulus of the omitted tail.
    pub tail_bound: f64,
    pub terms_used: usize,
    /// Estimate of accumulated floating-point error in the retained terms.
    pub rounding_estimate: f64,
}

impl TruncatedValue {
    /// Tail bound plus rounding estimate.
    pub fn error_estimate(&self) -> f64 {
        self.tail_bound + self.rounding_estimate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    pub term_cap: usize,
    /// Largest term ratio accepted as a geometric-tail certificate.
    pub ratio_threshold: f64,
}

pub const DEFAULT_TERM_CAP: usize = 10_000;

static TERM_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_TERM_CAP);

/// Change the term cap used by every [`SeriesConfig::default`] in the process.
pub fn set_default_term_cap(cap: usize) -> Result<()> {
    if cap == 0 {
        return Err(QError::InvalidArgument("term cap must be positive".into()));
    }
    TERM_CAP.store(cap, Ordering::Relaxed);
    Ok(())
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            term_cap: TERM_CAP.load(Ordering::Relaxed),
            ratio_threshold: 0.9,
        }
    }
}

/// Tolerance used internally when the series is evaluated for root finding.
pub const WORKING_TOL: f64 = 1e-18;

enum Stop {
    Adaptive(f64),
    Fixed(usize),
}

/// Evaluator for one [`FunctionSpec`] and its derivatives.
#[derive(Debug, Clone, Copy)]
pub struct Series {
    spec: FunctionSpec,
    config: SeriesConfig,
}

/// `d(d-1)...(d-k+1)` as a float.
fn falling(d: u64, k: u32) -> f64 {
    (0..k as u64).map(|j| (d - j) as f64).product()
}

impl Series {
    pub fn new(spec: FunctionSpec) -> Self {
        Self::with_config(spec, SeriesConfig::default())
    }

    pub fn with_config(spec: FunctionSpec, config: SeriesConfig) -> Self {
        Self { spec, config }
    }

    pub fn spec(&self) -> FunctionSpec {
        self.spec
    }

    pub fn config(&self) -> SeriesConfig {
        self.config
    }

    pub fn eval(&self, z: Complex64, tol: f64) -> Result<TruncatedValue> {
        self.eval_derivative(z, 0, tol)
    }

    /// `order`-th derivative, summed until the tail is certified below
    /// `tol * max(1, |partial sum|)`.
    pub fn eval_derivative(&self, z: Complex64, order: u32, tol: f64) -> Result<TruncatedValue> {
        if !(tol > 0.0) {
            return Err(QError::InvalidArgument(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        self.run(z, order, Stop::Adaptive(tol))
    }

    /// Sum exactly `n_terms` nonzero terms; the tail bound is still reported
    /// when the ratio certificate holds, `inf` otherwise.
    pub fn eval_fixed(&self, z: Complex64, order: u32, n_terms: usize) -> Result<TruncatedValue> {
        self.run(z, order, Stop::Fixed(n_terms))
    }

    fn check_domain(&self, z: Complex64) -> Result<()> {
        if let Some(radius) = self.spec.qp.convergence_radius() {
            let modulus = z.norm();
            if modulus >= radius {
                return Err(QError::OutsideConvergence {
                    modulus,
                    radius,
                    q: self.spec.qp.q(),
                });
            }
        }
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(QError::InvalidArgument(format!("non-finite argument {z}")));
        }
        Ok(())
    }

    fn run(&self, z: Complex64, order: u32, stop: Stop) -> Result<TruncatedValue> {
        self.check_domain(z)?;
        let family = self.spec.family;
        let qp = self.spec.qp;
        let step = family.step();

        // first term whose degree survives the differentiation
        let mut m = 0u64;
        while family.degree(m) < order as u64 {
            m += 1;
        }
        let mut degree = family.degree(m);
        let z_step = if step == 1 { z } else { z * z };
        let z_step_abs = z_step.norm();
        let mut term = Complex64::new(family.coefficient(m, qp) * falling(degree, order), 0.0)
            * z.powu((degree - order as u64) as u32);

        let mut acc = ComplexNeumaier::new();
        let mut weighted_abs = 0.0;
        let mut terms_used = 0usize;
        loop {
            acc.add(term);
            terms_used += 1;
            weighted_abs += (terms_used as f64 + 2.0) * term.norm();

            let next_m = m + 1;
            let next_degree = family.degree(next_m);
            let growth = falling(next_degree, order) / falling(degree, order);
            let next_term = term * z_step * (family.coefficient_ratio(next_m, qp) * growth);

            // bound on |t_{j+1}/t_j| for every j > next_m
            let after = family.degree(next_m + 1);
            let rho = family.ratio_majorant(next_m + 1, qp)
                * (falling(after, order) / falling(next_degree, order))
                * z_step_abs;
            let next_abs = next_term.norm();
            let certified = next_abs == 0.0 || rho < self.config.ratio_threshold;

            let done = match stop {
                Stop::Adaptive(tol) => {
                    let scale = acc.value().norm().max(1.0);
                    certified && next_abs <= tol * scale
                }
                Stop::Fixed(n) => terms_used >= n,
            };
            if done {
                let tail_bound = if next_abs == 0.0 {
                    0.0
                } else if certified {
                    next_abs / (1.0 - rho)
                } else {
                    f64::INFINITY
                };
                let value = acc.value();
                return Ok(TruncatedValue {
                    value,
                    tail_bound,
                    terms_used,
                    rounding_estimate: f64::EPSILON * (value.norm() + 2.0 * weighted_abs),
                });
            }
            if matches!(stop, Stop::Adaptive(_)) && terms_used >= self.config.term_cap {
                return Err(QError::NoConvergence {
                    cap: self.config.term_cap,
                });
            }
            term = next_term;
            m = next_m;
            degree = next_degree;
        }
    }
}

/// Evaluate the defining series of `spec` at `z`.
pub fn eval_series(spec: FunctionSpec, z: Complex64, tol: f64) -> Result<TruncatedValue> {
    Series::new(spec).eval(z, tol)
}
