//! Sum rules over reciprocal powers of zeros, the natural-logarithm series
//! `b(z)`, and the quantities derived from them.
//!
//! Every family member `f` is written as `prefactor(z) * F(x)` with
//! `F(0) = 1` and `x = z` (or `x = z^2` for the trigonometric pair). If
//! `F(x) = sum L_k x^k` has zeros `x_i`, then
//!
//! ```text
//! ln F(x) = -sum_n sigma_n x^n / n,     sigma_n = sum_i x_i^{-n}
//! ```
//!
//! The `sigma_n` follow from the `L_k` by three equivalent routes: the
//! Newton identity of the logarithmic derivative (quadratic cost, the default),
//! the composition expansion of `ln(1 + (F - 1))`, and the composition
//! expansion of `exp(-sum sigma_k x^k / k)` solved for its top term.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{check_degree, product_sum};
use crate::error::{QError, Result};
use crate::precise::{brackets, refine, Mp, Prec, Refined};
use crate::qlog::{horner, CoeffKind, CoeffList, SeriesValue, LAST_TERM_RATIO};
use crate::qnum::{bracket, bracket_factorial, Convention, Family, FunctionSpec, QParam};
use crate::zeroscape;

/// Highest series index for the quadratic-cost paths.
pub const MAX_SERIES_INDEX: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaMethod {
    /// Newton identity on the Maclaurin coefficients.
    Series,
    /// Solve the exponential expansion for the top sigma.
    Recursive,
    /// Composition expansion of the logarithm.
    Direct,
    /// Exact formula, Jackson exponential with `q > 1` only.
    ClosedForm,
    /// Sum over numerically located zeros plus a tail bound.
    ZeroPartialSum { zeros: usize },
}

impl SigmaMethod {
    pub fn name(&self) -> &'static str {
        match self {
            SigmaMethod::Series => "series",
            SigmaMethod::Recursive => "recursive",
            SigmaMethod::Direct => "direct",
            SigmaMethod::ClosedForm => "closed",
            SigmaMethod::ZeroPartialSum { .. } => "zeros",
        }
    }
}

/// One sum rule value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumRule {
    pub spec: FunctionSpec,
    /// Index as a power of `z`: even for cosine, odd and at least 3 for sine.
    pub index: u32,
    pub value: f64,
    pub error_estimate: f64,
    pub method: SigmaMethod,
}

fn is_trig(family: Family) -> bool {
    matches!(family, Family::Cos | Family::Sin)
}

/// Translate a z-power index into the index of the series variable.
pub fn series_index(family: Family, index: u32) -> Result<usize> {
    let bad = |why: &str| Err(QError::IndexOutOfRange(format!("{family} index {index}: {why}")));
    match family {
        Family::Cos if index < 2 || !index.is_multiple_of(2) => bad("must be even and at least 2"),
        Family::Cos => Ok(index as usize / 2),
        Family::Sin if index < 3 || index % 2 != 1 => bad("must be odd and at least 3"),
        Family::Sin => Ok((index as usize - 1) / 2),
        _ if index == 0 => bad("must be at least 1"),
        _ => Ok(index as usize),
    }
}

/// Inverse of [`series_index`].
pub fn z_index(family: Family, m: usize) -> u32 {
    match family {
        Family::Cos => 2 * m as u32,
        Family::Sin => 2 * m as u32 + 1,
        _ => m as u32,
    }
}

/// Normalized Maclaurin coefficients `L_0 = 1, ..., L_n` of `F`.
pub(crate) fn unit_coefficients(spec: FunctionSpec, n: usize, p: Prec) -> Vec<Mp> {
    let top = match spec.family {
        Family::Cos | Family::Sin => 2 * n + 1,
        Family::ExpDerivative(r) => n + r as usize,
        _ => n,
    };
    let b = brackets(spec.qp, top, p);
    let mut out = Vec::with_capacity(n + 1);
    out.push(p.one());
    for k in 1..=n {
        let kk = p.int(k as i64);
        let ratio = match spec.family {
            Family::Exp => p.one() / &b[k],
            Family::ExpDerivative(r) => {
                let r = r as usize;
                p.int((k + r) as i64) / (&kk * &b[k + r])
            }
            Family::ExpIntegral(r) => kk / (p.int((k + r as usize) as i64) * &b[k]),
            Family::Cos => -(p.one() / (&b[2 * k - 1] * &b[2 * k])),
            Family::Sin => -(p.one() / (&b[2 * k] * &b[2 * k + 1])),
        };
        let next = &out[k - 1] * ratio;
        out.push(next);
    }
    out
}

fn newton_sigma(l: &[Mp], p: Prec) -> Vec<Mp> {
    let n = l.len() - 1;
    let mut s = vec![p.zero(); n + 1];
    for m in 1..=n {
        let mut acc = p.int(m as i64) * &l[m];
        for k in 1..m {
            acc += &s[k] * &l[m - k];
        }
        s[m] = -acc;
    }
    s
}

fn direct_sigma(l: &[Mp], p: Prec) -> Vec<Mp> {
    let n = l.len() - 1;
    let mut s = vec![p.zero(); n + 1];
    for m in 1..=n {
        let mut acc = p.zero();
        for len in 1..=m {
            let term = product_sum(m as u32, len as u32, l, p) / p.int(len as i64);
            if len % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        s[m] = p.int(m as i64) * acc;
    }
    s
}

fn recursive_sigma(l: &[Mp], p: Prec) -> Vec<Mp> {
    let n = l.len() - 1;
    let mut s = vec![p.zero(); n + 1];
    // scaled[k] = sigma_k / k
    let mut scaled = vec![p.zero(); n + 1];
    let mut inv_fact = p.one();
    let mut inv_facts = vec![p.one()];
    for len in 1..=n {
        inv_fact /= p.int(len as i64);
        inv_facts.push(inv_fact.clone());
    }
    for m in 1..=n {
        let mut acc = p.zero();
        for len in 2..=m {
            let term = product_sum(m as u32, len as u32, &scaled, p) * &inv_facts[len];
            if len % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        s[m] = p.int(m as i64) * (acc - &l[m]);
        scaled[m] = &s[m] / p.int(m as i64);
    }
    s
}

/// Coefficients of `exp(-sum sigma_k x^k / k)`.
fn exp_from_sigma(s: &[Mp], p: Prec) -> Vec<Mp> {
    let n = s.len() - 1;
    let mut h = vec![p.zero(); n + 1];
    h[0] = p.one();
    for m in 1..=n {
        let mut acc = p.zero();
        for k in 1..=m {
            acc += &s[k] * &h[m - k];
        }
        h[m] = -(acc / p.int(m as i64));
    }
    h
}

fn algebraic_sigma(spec: FunctionSpec, n: usize, method: SigmaMethod, p: Prec) -> Vec<Mp> {
    let l = unit_coefficients(spec, n, p);
    match method {
        SigmaMethod::Direct => direct_sigma(&l, p),
        SigmaMethod::Recursive => recursive_sigma(&l, p),
        _ => newton_sigma(&l, p),
    }
}

fn check_series_range(n: usize, method: SigmaMethod) -> Result<()> {
    match method {
        SigmaMethod::Direct | SigmaMethod::Recursive => check_degree(n as u32),
        _ if n > MAX_SERIES_INDEX => Err(QError::IndexOutOfRange(format!(
            "series index {n} exceeds {MAX_SERIES_INDEX}"
        ))),
        _ => Ok(()),
    }
}

fn closed_form(spec: FunctionSpec, m: usize) -> Result<(f64, f64)> {
    let q = spec.qp.q();
    if spec.family != Family::Exp || spec.qp.convention() != Convention::Jackson || q <= 1.0 {
        return Err(QError::MethodMismatch {
            method: "closed".into(),
            family: format!("{} ({}, q = {q})", spec.family, spec.qp.convention()),
        });
    }
    // zeros at q^i/(1-q), i >= 1
    let n = m as i32;
    let value = -(1.0 - q).powi(n) / (1.0 - q.powi(n));
    Ok((value, 4.0 * (m as f64 + 1.0) * f64::EPSILON * value.abs()))
}

/// `sigma_1 ..= sigma_n` of the series variable (index 0 holds zero).
pub fn sigma_series(spec: FunctionSpec, n: usize, method: SigmaMethod) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(QError::IndexOutOfRange("need at least one sum rule".into()));
    }
    check_series_range(n, method)?;
    match method {
        SigmaMethod::ClosedForm => {
            let mut values = vec![0.0];
            let mut errors = vec![0.0];
            for m in 1..=n {
                let (v, e) = closed_form(spec, m)?;
                values.push(v);
                errors.push(e);
            }
            Ok((values, errors))
        }
        SigmaMethod::ZeroPartialSum { zeros } => {
            let partial = zero_partial_sums(spec, n, zeros)?;
            Ok((partial.values, partial.errors))
        }
        _ => {
            let Refined { values, errors, .. } =
                refine(|p| Ok(algebraic_sigma(spec, n, method, p)))?;
            let errors = values
                .iter()
                .zip(errors)
                .map(|(v, e)| e + f64::EPSILON * v.abs())
                .collect();
            Ok((values, errors))
        }
    }
}

/// A single sum rule. `index` is the power of `z` (`2n` for cosine,
/// `2n+1` for sine).
pub fn sigma(spec: FunctionSpec, index: u32, method: SigmaMethod) -> Result<SumRule> {
    let m = series_index(spec.family, index)?;
    let (values, errors) = sigma_series(spec, m, method)?;
    Ok(SumRule {
        spec,
        index,
        value: values[m],
        error_estimate: errors[m],
        method,
    })
}

struct ZeroSums {
    values: Vec<f64>,
    errors: Vec<f64>,
}

/// Bound on `sum_{i > M} |x_i|^{-n}` from the last computed zeros.
///
/// With geometric growth of the moduli the geometric series bound applies.
/// Otherwise spacing at least `delta` gives the integral comparison
/// `|x_M|^{1-n} / ((n-1) delta)`.
pub(crate) fn zero_tail_bound(moduli: &[f64], n: f64) -> f64 {
    let k = moduli.len();
    if k < 2 {
        return f64::INFINITY;
    }
    let last = moduli[k - 1];
    let start = k.saturating_sub(4).max(1);
    let ratio = (start..k)
        .map(|i| moduli[i] / moduli[i - 1])
        .fold(f64::INFINITY, f64::min);
    let spacing = (start..k)
        .map(|i| moduli[i] - moduli[i - 1])
        .fold(f64::INFINITY, f64::min);
    let geometric = if ratio > 1.0 {
        let rn = ratio.powf(n);
        last.powf(-n) / (rn - 1.0)
    } else {
        f64::INFINITY
    };
    let integral = if n > 1.0 && spacing > 0.0 {
        last.powf(1.0 - n) / ((n - 1.0) * spacing)
    } else {
        f64::INFINITY
    };
    geometric.min(integral)
}

fn zero_partial_sums(spec: FunctionSpec, n: usize, count: usize) -> Result<ZeroSums> {
    if !matches!(spec.family, Family::Exp | Family::Cos | Family::Sin) {
        return Err(QError::MethodMismatch {
            method: "zeros".into(),
            family: spec.family.to_string(),
        });
    }
    // zeros of F in its own variable with their location errors; the
    // trigonometric zeros come as +-c, one u = c^2 per pair
    let points: Vec<(Complex64, f64)> = if is_trig(spec.family) {
        zeroscape::positive_real_zeros(spec, count)?
            .iter()
            .map(|z| (z.location * z.location, 2.0 * z.location.norm() * z.location_error))
            .collect()
    } else {
        zeroscape::leading_zeros(spec, count)?
            .iter()
            .map(|z| (z.location, z.location_error))
            .collect()
    };
    if points.len() < 2 {
        return Err(QError::InsufficientZeros(format!(
            "only {} zeros available for {}",
            points.len(),
            spec.family
        )));
    }
    let moduli: Vec<f64> = points.iter().map(|(z, _)| z.norm()).collect();
    let mut values = vec![0.0];
    let mut errors = vec![0.0];
    for m in 1..=n {
        let mut acc = crate::sum::ComplexNeumaier::new();
        for (z, _) in &points {
            acc.add(z.powi(-(m as i32)));
        }
        let tail = zero_tail_bound(&moduli, m as f64);
        // location error of each zero feeds through d(x^-m)/dx
        let location: f64 = points
            .iter()
            .map(|(z, err)| m as f64 * err * z.norm().powi(-(m as i32) - 1))
            .sum();
        values.push(acc.value().re);
        errors.push(tail * (1.0 + 1e-9) + location + 4.0 * f64::EPSILON * acc.value().norm());
    }
    Ok(ZeroSums { values, errors })
}

/// Coefficients `b_1..b_N` of `ln F(x) = sum b_n x^n`, i.e. `b_n = -sigma_n / n`.
pub fn b_series_coeffs(spec: FunctionSpec, n: usize) -> Result<CoeffList> {
    b_series_coeffs_with(spec, n, SigmaMethod::Series)
}

pub fn b_series_coeffs_with(spec: FunctionSpec, n: usize, method: SigmaMethod) -> Result<CoeffList> {
    let (values, errors) = sigma_series(spec, n, method)?;
    let scale = |m: usize| if m == 0 { 0.0 } else { -1.0 / m as f64 };
    Ok(CoeffList {
        coeffs: values.iter().enumerate().map(|(m, s)| s * scale(m)).collect(),
        errors: errors.iter().enumerate().map(|(m, e)| e * scale(m).abs()).collect(),
        qp: spec.qp,
        kind: CoeffKind::BSeries(spec.family),
    })
}

/// Multiplier that restores the family member from `exp(b)`.
fn prefactor(spec: FunctionSpec, z: Complex64) -> Result<Complex64> {
    Ok(match spec.family {
        Family::Exp | Family::Cos => Complex64::new(1.0, 0.0),
        Family::Sin => z,
        Family::ExpDerivative(r) => {
            let r = r as u64;
            let fact: f64 = (1..=r).map(|k| k as f64).product();
            Complex64::new(fact / bracket_factorial(r, spec.qp)?, 0.0)
        }
        Family::ExpIntegral(r) => {
            let fact: f64 = (1..=r as u64).map(|k| k as f64).product();
            z.powu(r) / fact
        }
    })
}

/// `prefactor(z) * exp(b(x))` from `N` coefficients of the logarithm series.
pub fn exp_b_eval(spec: FunctionSpec, z: Complex64, n: usize) -> Result<SeriesValue> {
    let coeffs = b_series_coeffs(spec, n)?;
    exp_b_eval_with(&coeffs, z)
}

/// As [`exp_b_eval`] with precomputed coefficients.
pub fn exp_b_eval_with(coeffs: &CoeffList, z: Complex64) -> Result<SeriesValue> {
    let CoeffKind::BSeries(family) = coeffs.kind else {
        return Err(QError::InvalidArgument("expected b-series coefficients".into()));
    };
    let spec = FunctionSpec::new(family, coeffs.qp);
    let x = if is_trig(family) { z * z } else { z };
    let log = horner(&coeffs.coeffs, x);
    let value = prefactor(spec, z)? * log.value.exp();
    Ok(SeriesValue {
        value,
        last_term: log.last_term,
        certified: log.last_term <= LAST_TERM_RATIO * log.value.norm().max(1.0),
    })
}

/// Normalized Maclaurin coefficients rebuilt as `exp(-sum sigma_k x^k / k)`
/// with sigma from `method`; degree `k` should equal `L_k`.
pub fn reconstruct_coefficients(spec: FunctionSpec, n: usize, method: SigmaMethod) -> Result<Vec<f64>> {
    if !matches!(method, SigmaMethod::Series | SigmaMethod::Direct | SigmaMethod::Recursive) {
        return Err(QError::MethodMismatch {
            method: method.name().into(),
            family: spec.family.to_string(),
        });
    }
    check_series_range(n, method)?;
    let refined = refine(|p| {
        let sigma = algebraic_sigma(spec, n, method, p);
        Ok(exp_from_sigma(&sigma, p))
    })?;
    Ok(refined.values)
}

/// Normalized Maclaurin coefficients `L_0..=L_n` rounded to binary64.
pub fn unit_coefficients_f64(spec: FunctionSpec, n: usize) -> Result<Vec<f64>> {
    Ok(refine(|p| Ok(unit_coefficients(spec, n, p)))?.values)
}

/// `1/[n]!` rebuilt from `sigma_1 = -1, sigma_2, ..., sigma_n` of the
/// q-exponential, with the sigmas taken from the composition recursion.
pub fn bracket_reciprocal_from_sigma(n: usize, qp: QParam) -> Result<f64> {
    if !(2..=crate::combinatorics::MAX_COMPOSITION_DEGREE as usize).contains(&n) {
        return Err(QError::IndexOutOfRange(format!("n = {n} must lie in 2..=24")));
    }
    let values = reconstruct_coefficients(FunctionSpec::exp(qp), n, SigmaMethod::Recursive)?;
    Ok(values[n])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BernoulliVariant {
    /// From the cosine sum rules.
    Tilde,
    /// From the sine sum rules.
    Plain,
}

/// q-Bernoulli number of order `n` built from trigonometric sum rules.
pub fn q_bernoulli(n: u32, qp: QParam, variant: BernoulliVariant) -> Result<f64> {
    if n == 0 {
        return Err(QError::IndexOutOfRange("Bernoulli order must be at least 1".into()));
    }
    let two_n = 2 * n;
    let fact: f64 = (1..=two_n as u64).map(|k| k as f64).product();
    let scale = fact / 2f64.powi(two_n as i32 - 1);
    Ok(match variant {
        BernoulliVariant::Plain => {
            let s = sigma(FunctionSpec::new(Family::Sin, qp), two_n + 1, SigmaMethod::Series)?;
            scale * s.value
        }
        BernoulliVariant::Tilde => {
            let c = sigma(FunctionSpec::new(Family::Cos, qp), two_n, SigmaMethod::Series)?;
            scale * c.value / (2f64.powi(two_n as i32) - 1.0)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaValue {
    pub value: f64,
    /// Bound on the omitted zeros plus the effect of zero location errors.
    pub tail_estimate: f64,
    pub zeros_used: usize,
}

/// Zero sum `sum_i s_i^{-p}` over the positive zeros of `sin_q`
/// (`Plain`), or `sum_i c_i^{-p} / (2^p - 1)` over those of `cos_q` (`Tilde`).
///
/// Uses up to `count` zeros; fewer are used when the series can no longer
/// place them reliably, which only widens the reported tail.
pub fn q_zeta(p: f64, qp: QParam, variant: BernoulliVariant, count: usize) -> Result<ZetaValue> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(QError::InvalidArgument(format!("p must be a real number above 1, got {p}")));
    }
    let family = match variant {
        BernoulliVariant::Plain => Family::Sin,
        BernoulliVariant::Tilde => Family::Cos,
    };
    let spec = FunctionSpec::new(family, qp);
    let zeros = zeroscape::positive_real_zeros(spec, count)?;
    if zeros.len() < 2 {
        return Err(QError::InsufficientZeros(format!(
            "{} reliable zeros of {family} at q = {}",
            zeros.len(),
            qp.q()
        )));
    }
    let moduli: Vec<f64> = zeros.iter().map(|z| z.location.re).collect();
    let mut acc = crate::sum::Neumaier::new();
    let mut location = 0.0;
    for z in &zeros {
        let x = z.location.re;
        acc.add(x.powf(-p));
        location += p * z.location_error * x.powf(-p - 1.0);
    }
    let norm = match variant {
        BernoulliVariant::Plain => 1.0,
        BernoulliVariant::Tilde => 2f64.powf(p) - 1.0,
    };
    let tail = zero_tail_bound(&moduli, p);
    Ok(ZetaValue {
        value: acc.value() / norm,
        tail_estimate: (tail + location) / norm,
        zeros_used: zeros.len(),
    })
}

fn require_jackson_below_one(qp: QParam) -> Result<()> {
    if qp.convention() != Convention::Jackson || !(qp.q() < 1.0) {
        return Err(QError::InvalidArgument(format!(
            "the q-dilogarithm needs the Jackson convention with 0 < q < 1, got {} q = {}",
            qp.convention(),
            qp.q()
        )));
    }
    Ok(())
}

/// `Li2(z; q) = sum_{n=1}^{N} z^n / (n (1 - q^n))`.
pub fn q_dilog(z: Complex64, qp: QParam, n: usize) -> Result<SeriesValue> {
    require_jackson_below_one(qp)?;
    let ln_q = qp.q().ln();
    let mut coeffs = vec![0.0; n + 1];
    for (k, c) in coeffs.iter_mut().enumerate().skip(1) {
        *c = 1.0 / (k as f64 * -(k as f64 * ln_q).exp_m1());
    }
    Ok(horner(&coeffs, z))
}

/// The two sides of `Li2(z; q) = ln E_q(z / (1 - q))`: the logarithm of the
/// directly summed Jackson exponential, and the logarithm series of that
/// exponential.
pub fn dilog_identity(z: Complex64, qp: QParam, n: usize) -> Result<(Complex64, Complex64)> {
    require_jackson_below_one(qp)?;
    let x = z / (1.0 - qp.q());
    let spec = FunctionSpec::exp(qp);
    let direct = crate::qnum::eval_series(spec, x, 1e-17)?.value.ln();
    let series = horner(&b_series_coeffs(spec, n)?.coeffs, x).value;
    Ok((direct, series))
}

/// The Jackson logarithm-series coefficient `(1-q)^{n-1} / (n [n]_J)`.
pub fn jackson_b_closed_form(n: usize, qp: QParam) -> Result<f64> {
    let q = qp.q();
    Ok((1.0 - q).powi(n as i32 - 1) / (n as f64 * bracket(n as u64, qp)?))
}
