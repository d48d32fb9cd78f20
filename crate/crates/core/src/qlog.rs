//! The inverse series `ln_q(1+w) = sum c_n w^n` of the q-exponential.
//!
//! Two independent constructions are provided. The composition recursion
//! follows the coefficient matching of `e_q(ln_q(1+w)) = 1 + w` literally and
//! is exponential in the degree; power-table reversion solves the same
//! equations degree by degree in cubic time and is the production path.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{check_degree, product_sum};
use crate::error::{QError, Result};
use crate::precise::{brackets, refine, Mp, Prec};
use crate::qnum::{bracket, Family, QParam};

/// Highest degree accepted by [`LnqMethod::Reversion`].
pub const MAX_REVERSION_DEGREE: usize = 200;

/// Relative size of the last retained term below which an evaluation counts
/// as converged.
pub const LAST_TERM_RATIO: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LnqMethod {
    Recursive,
    Reversion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "family")]
pub enum CoeffKind {
    /// Coefficients of `ln_q(1+w)`.
    LnqCoeff,
    /// q-derivative of `ln_q(1+w)` with respect to `w`.
    LnqDerivative,
    /// Natural-logarithm series `b(z)` of a family member. Trigonometric
    /// families are expanded in `u = z^2`.
    BSeries(Family),
}

/// Coefficients indexed by degree, starting at degree zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffList {
    pub coeffs: Vec<f64>,
    /// Per-coefficient error estimate of the rounding to binary64.
    pub errors: Vec<f64>,
    pub qp: QParam,
    pub kind: CoeffKind,
}

impl CoeffList {
    /// Highest degree present.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Coefficient of degree `n`, zero beyond the stored range.
    pub fn get(&self, n: usize) -> f64 {
        self.coeffs.get(n).copied().unwrap_or(0.0)
    }
}

/// Polynomial value with a convergence flag from the last-term criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: Complex64,
    /// Modulus of the highest-degree term.
    pub last_term: f64,
    pub certified: bool,
}

/// Horner evaluation of `sum coeffs[n] x^n`, flagged by the last-term test.
pub(crate) fn horner(coeffs: &[f64], x: Complex64) -> SeriesValue {
    let value = coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c);
    let last_term = coeffs
        .iter()
        .enumerate()
        .rev()
        .find(|(_, &c)| c != 0.0)
        .map(|(n, &c)| c.abs() * x.norm().powi(n as i32))
        .unwrap_or(0.0);
    SeriesValue {
        value,
        last_term,
        certified: last_term <= LAST_TERM_RATIO * value.norm(),
    }
}

/// `1/[k]!` for `k = 0..=n` at precision `p`.
pub(crate) fn inverse_factorials(qp: QParam, n: usize, p: Prec) -> Vec<Mp> {
    let b = brackets(qp, n, p);
    let mut out = Vec::with_capacity(n + 1);
    out.push(p.one());
    for k in 1..=n {
        let next = &out[k - 1] / &b[k];
        out.push(next);
    }
    out
}

fn recursive_mp(n_max: usize, qp: QParam, p: Prec) -> Vec<Mp> {
    let inv_fact = inverse_factorials(qp, n_max, p);
    let mut c = vec![p.zero(); n_max + 1];
    if n_max >= 1 {
        c[1] = p.one();
    }
    for n in 2..=n_max {
        let mut acc = p.zero();
        for l in 2..=n {
            acc += &inv_fact[l] * product_sum(n as u32, l as u32, &c, p);
        }
        c[n] = -acc;
    }
    c
}

fn reversion_mp(n_max: usize, qp: QParam, p: Prec) -> Vec<Mp> {
    let inv_fact = inverse_factorials(qp, n_max, p);
    let mut c = vec![p.zero(); n_max + 1];
    // powers[l][m] = coefficient of w^m in a(w)^l, filled column by column
    let mut powers = vec![vec![p.zero(); n_max + 1]; n_max + 1];
    for n in 1..=n_max {
        let mut acc = p.zero();
        for l in (2..=n).rev() {
            let mut entry = p.zero();
            for k in 1..=n + 1 - l {
                entry += &c[k] * &powers[l - 1][n - k];
            }
            acc += &inv_fact[l] * &entry;
            powers[l][n] = entry;
        }
        c[n] = if n == 1 { p.one() } else { -acc };
        powers[1][n] = c[n].clone();
    }
    c
}

/// Coefficients `c_0 = 0, c_1, ..., c_N` of `ln_q(1+w)`.
pub fn lnq_coefficients(n_max: usize, qp: QParam, method: LnqMethod) -> Result<CoeffList> {
    if n_max == 0 {
        return Err(QError::IndexOutOfRange("N must be at least 1".into()));
    }
    let refined = match method {
        LnqMethod::Recursive => {
            check_degree(n_max as u32)?;
            refine(|p| Ok(recursive_mp(n_max, qp, p)))?
        }
        LnqMethod::Reversion => {
            if n_max > MAX_REVERSION_DEGREE {
                return Err(QError::IndexOutOfRange(format!(
                    "N = {n_max} exceeds the reversion limit {MAX_REVERSION_DEGREE}"
                )));
            }
            refine(|p| Ok(reversion_mp(n_max, qp, p)))?
        }
    };
    Ok(CoeffList {
        coeffs: refined.values,
        errors: refined.errors,
        qp,
        kind: CoeffKind::LnqCoeff,
    })
}

/// Truncated `ln_q(1+w)`.
pub fn lnq_eval(w: Complex64, coeffs: &CoeffList) -> Result<SeriesValue> {
    if coeffs.kind != CoeffKind::LnqCoeff {
        return Err(QError::InvalidArgument(
            "lnq_eval expects ln_q coefficients".into(),
        ));
    }
    Ok(horner(&coeffs.coeffs, w))
}

/// Coefficients of `D_q ln_q(1+w)`: degree `n` maps to `[n] c_n` at degree `n-1`.
pub fn lnq_qderivative_coeffs(coeffs: &CoeffList) -> Result<CoeffList> {
    if coeffs.kind != CoeffKind::LnqCoeff {
        return Err(QError::InvalidArgument(
            "q-derivative expects ln_q coefficients".into(),
        ));
    }
    let mut out = Vec::with_capacity(coeffs.degree());
    let mut errors = Vec::with_capacity(coeffs.degree());
    for n in 1..coeffs.coeffs.len() {
        let b = bracket(n as u64, coeffs.qp)?;
        out.push(b * coeffs.coeffs[n]);
        errors.push(b * coeffs.errors[n] + f64::EPSILON * (b * coeffs.coeffs[n]).abs());
    }
    Ok(CoeffList {
        coeffs: out,
        errors,
        qp: coeffs.qp,
        kind: CoeffKind::LnqDerivative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::{bracket_factorial, eval_series, FunctionSpec};

    fn sym(q: f64) -> QParam {
        QParam::symmetric(q).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs())
    }

    #[test]
    fn leading_coefficients() {
        for qp in [sym(0.3), sym(0.8), QParam::jackson(1.09).unwrap()] {
            let c = lnq_coefficients(5, qp, LnqMethod::Reversion).unwrap();
            let f2 = bracket_factorial(2, qp).unwrap();
            let f3 = bracket_factorial(3, qp).unwrap();
            assert_eq!(c.coeffs[0], 0.0);
            assert_eq!(c.coeffs[1], 1.0);
            assert!(rel(c.coeffs[2], -1.0 / f2) < 1e-15);
            assert!(rel(c.coeffs[3], -(1.0 / f3 - 2.0 / (f2 * f2))) < 1e-15);
        }
    }

    #[test]
    fn small_q_limit() {
        // c_2 = -1/[2]! with [2] = q^{1/2} + q^{-1/2}
        let c = lnq_coefficients(3, sym(1e-4), LnqMethod::Recursive).unwrap();
        assert!(rel(c.coeffs[2], -1.0 / 100.01) < 1e-14);
        let c = lnq_coefficients(3, sym(1e-8), LnqMethod::Recursive).unwrap();
        assert!(c.coeffs[2].abs() < 1e-3);
    }

    #[test]
    fn classical_logarithm() {
        for method in [LnqMethod::Recursive, LnqMethod::Reversion] {
            let c = lnq_coefficients(6, sym(1.0), method).unwrap();
            for n in 1..=6 {
                let expect = if n % 2 == 1 { 1.0 } else { -1.0 } / n as f64;
                assert!((c.coeffs[n] - expect).abs() < 1e-15, "{method:?} n={n}");
            }
        }
        let c = lnq_coefficients(50, sym(1.0), LnqMethod::Reversion).unwrap();
        let v = lnq_eval(Complex64::new(0.1, 0.0), &c).unwrap();
        assert!((v.value.re - 1.1f64.ln()).abs() < 1e-10);
        assert!(v.certified);
        assert_eq!(lnq_eval(Complex64::new(0.0, 0.0), &c).unwrap().value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn methods_agree() {
        for qp in [sym(0.1), QParam::jackson(0.5).unwrap(), sym(0.9)] {
            let a = lnq_coefficients(14, qp, LnqMethod::Recursive).unwrap();
            let b = lnq_coefficients(14, qp, LnqMethod::Reversion).unwrap();
            for n in 1..=14 {
                assert!(rel(a.coeffs[n], b.coeffs[n]) < 1e-12, "{qp:?} n={n}");
            }
        }
    }

    #[test]
    fn round_trip_through_exponential() {
        let qp = sym(0.5);
        let c = lnq_coefficients(40, qp, LnqMethod::Reversion).unwrap();
        for k in 0..8 {
            let w = Complex64::from_polar(0.1, k as f64 * 0.8);
            let a = lnq_eval(w, &c).unwrap().value;
            let e = eval_series(FunctionSpec::exp(qp), a, 1e-17).unwrap().value;
            assert!((e - (1.0 + w)).norm() < 1e-10);
        }
    }

    #[test]
    fn q_derivative_coefficients() {
        let qp = sym(0.5);
        let c = lnq_coefficients(6, qp, LnqMethod::Reversion).unwrap();
        let d = lnq_qderivative_coeffs(&c).unwrap();
        assert_eq!(d.kind, CoeffKind::LnqDerivative);
        assert!((d.coeffs[0] - 1.0).abs() < 1e-15);
        assert!((d.coeffs[1] + 1.0).abs() < 1e-15);
        let b3 = bracket(3, qp).unwrap();
        let f2 = bracket_factorial(2, qp).unwrap();
        let f3 = bracket_factorial(3, qp).unwrap();
        assert!(rel(d.coeffs[2], -b3 * (1.0 / f3 - 2.0 / (f2 * f2))) < 1e-14);
        assert!(rel(d.coeffs[2], -(1.0 / f2 - 2.0 * b3 / (f2 * f2))) < 1e-14);
        assert!(lnq_qderivative_coeffs(&d).is_err());
    }

    #[test]
    fn degree_limits() {
        assert!(lnq_coefficients(25, sym(0.5), LnqMethod::Recursive).is_err());
        assert!(lnq_coefficients(201, sym(0.5), LnqMethod::Reversion).is_err());
        assert!(lnq_coefficients(0, sym(0.5), LnqMethod::Reversion).is_err());
    }
}
