//! Multiprecision support for the formal power series algebra.
//!
//! Sum rules, logarithm coefficients and reconstructions are sums with heavy
//! cancellation (the alternating composition sums lose up to 60 bits near
//! q = 1). They are evaluated in binary floating point of adjustable precision
//! and the precision is doubled until two consecutive levels agree.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use num_complex::Complex64;

use crate::error::{QError, Result};
use crate::qnum::{Convention, Family, FunctionSpec, QParam};

pub(crate) type Mp = FBig<HalfEven>;

const START_BITS: usize = 128;
const MAX_BITS: usize = 4096;
/// Required relative agreement between consecutive levels.
const AGREEMENT: f64 = 1.0 / (1u64 << 60) as f64;

/// Working precision in bits; hands out constants at that precision.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Prec(pub usize);

impl Prec {
    pub fn zero(self) -> Mp {
        Mp::ZERO.with_precision(self.0).value()
    }

    pub fn one(self) -> Mp {
        Mp::ONE.with_precision(self.0).value()
    }

    pub fn int(self, n: i64) -> Mp {
        Mp::from(n).with_precision(self.0).value()
    }

    pub fn float(self, x: f64) -> Mp {
        Mp::try_from(x)
            .expect("finite input")
            .with_precision(self.0)
            .value()
    }
}

pub(crate) fn to_f64(x: &Mp) -> f64 {
    x.to_f64().value()
}

fn sqrt(x: &Mp, p: Prec) -> Mp {
    let mut s = p.float(to_f64(x).sqrt());
    // each step doubles the number of correct bits, starting from 53
    let mut bits = 50;
    while bits < 2 * p.0 {
        s = (&s + x / &s) / p.int(2);
        bits *= 2;
    }
    s
}

/// Brackets `[0], [1], ..., [n_max]` at precision `p`.
///
/// Both recurrences add positive quantities only, so no cancellation occurs.
pub(crate) fn brackets(qp: QParam, n_max: usize, p: Prec) -> Vec<Mp> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(p.zero());
    if n_max == 0 {
        return out;
    }
    if qp.is_classical() {
        out.extend((1..=n_max).map(|n| p.int(n as i64)));
        return out;
    }
    let q = p.float(qp.q());
    out.push(p.one());
    match qp.convention() {
        Convention::Symmetric => {
            // [n+1] = s [n] + s^{-n} with s = q^{1/2}
            let s = sqrt(&q, p);
            let inv_s = p.one() / &s;
            let mut inv_pow = inv_s.clone();
            for n in 1..n_max {
                let next = &s * &out[n] + &inv_pow;
                out.push(next);
                inv_pow = &inv_pow * &inv_s;
            }
        }
        Convention::Jackson => {
            for n in 1..n_max {
                let next = p.one() + &q * &out[n];
                out.push(next);
            }
        }
    }
    out
}

/// `a_m / a_{m-1}` from multiprecision brackets.
fn coefficient_ratio(family: Family, m: usize, b: &[Mp], p: Prec) -> Mp {
    let one = p.one();
    match family {
        Family::Exp => one / &b[m],
        Family::ExpDerivative(r) => {
            let r = r as usize;
            p.int((m + r) as i64) / (p.int(m as i64) * &b[m + r])
        }
        Family::ExpIntegral(r) => p.int(m as i64) / (p.int((m + r as usize) as i64) * &b[m]),
        Family::Cos => -(one / (&b[2 * m - 1] * &b[2 * m])),
        Family::Sin => -(one / (&b[2 * m] * &b[2 * m + 1])),
    }
}

/// `order`-th derivative of the series at `z`, summed at a precision that
/// covers the cancellation between terms. Returns the value, a bound on its
/// absolute error and the number of terms.
pub(crate) fn series_complex(spec: FunctionSpec, z: Complex64, order: u32) -> (Complex64, f64, usize) {
    let family = spec.family;
    let qp = spec.qp;
    // term magnitudes in log2, to size both the precision and the term count
    let lz = z.norm().max(f64::MIN_POSITIVE).log2();
    let mut log_a = family.leading_coefficient(qp).abs().log2();
    let mut peak = f64::NEG_INFINITY;
    let mut n_terms = 0usize;
    loop {
        let log_term = log_a + family.degree(n_terms as u64) as f64 * lz;
        peak = peak.max(log_term);
        n_terms += 1;
        log_a += family.coefficient_ratio(n_terms as u64, qp).abs().log2();
        let next = log_a + family.degree(n_terms as u64) as f64 * lz;
        if (next < peak - 200.0 && next < -200.0 && n_terms > 2) || n_terms > 20_000 {
            break;
        }
    }
    let p = Prec(256 + peak.max(0.0).ceil() as usize);
    let top = family.degree(n_terms as u64) as usize + family.step() as usize + 1;
    let b = brackets(qp, top, p);
    let (zr, zi) = (p.float(z.re), p.float(z.im));
    let mut a = match family {
        Family::ExpDerivative(r) => (1..=r as usize).fold(p.one(), |acc, k| acc * p.int(k as i64) / &b[k]),
        Family::ExpIntegral(r) => (1..=r as usize).fold(p.one(), |acc, k| acc / p.int(k as i64)),
        _ => p.one(),
    };
    let (mut sr, mut si) = (p.zero(), p.zero());
    // running power z^(d - order), advanced as the degree grows
    let (mut pr, mut pi) = (p.one(), p.zero());
    let mut power_degree = 0u64;
    for m in 0..=n_terms {
        if m > 0 {
            a *= coefficient_ratio(family, m, &b, p);
        }
        let d = family.degree(m as u64);
        if d < order as u64 {
            continue;
        }
        while power_degree < d - order as u64 {
            let next_r = &pr * &zr - &pi * &zi;
            pi = &pr * &zi + &pi * &zr;
            pr = next_r;
            power_degree += 1;
        }
        let falling = (0..order as u64).fold(p.one(), |acc, j| acc * p.int((d - j) as i64));
        let c = &a * falling;
        sr += &c * &pr;
        si += &c * &pi;
    }
    let value = Complex64::new(to_f64(&sr), to_f64(&si));
    let error = (peak - 180.0).exp2() + 2.0 * f64::EPSILON * value.norm();
    (value, error, n_terms + 1)
}

/// Result of a precision-refined computation, rounded to binary64.
#[derive(Debug, Clone)]
pub(crate) struct Refined {
    pub values: Vec<f64>,
    /// Difference between the last two precision levels, per element.
    pub errors: Vec<f64>,
    #[cfg_attr(not(test), allow(dead_code))]
    pub bits: usize,
}

fn agrees(lo: &Mp, hi: &Mp, bits_lo: usize) -> bool {
    let (a, b) = (to_f64(lo), to_f64(hi));
    if a == 0.0 && b == 0.0 {
        return true;
    }
    if !hi.repr().is_zero() {
        let rel = to_f64(&((lo - hi) / hi)).abs();
        if rel <= AGREEMENT {
            return true;
        }
    }
    // exact zeros never settle relatively; accept once both levels sit far
    // below any magnitude this library produces
    bits_lo >= 1024 && {
        let floor = (-(bits_lo as f64) / 2.0).exp2();
        a.abs() <= floor && b.abs() <= floor
    }
}

/// Run `f` at increasing precision until consecutive levels agree.
pub(crate) fn refine<F>(mut f: F) -> Result<Refined>
where
    F: FnMut(Prec) -> Result<Vec<Mp>>,
{
    let mut bits = START_BITS;
    let mut lo = f(Prec(bits))?;
    loop {
        let hi_bits = 2 * bits;
        let hi = f(Prec(hi_bits))?;
        if lo.len() != hi.len() {
            return Err(QError::Certification(
                "precision levels returned different lengths".into(),
            ));
        }
        let settled = lo.iter().zip(&hi).all(|(a, b)| agrees(a, b, bits));
        if settled || hi_bits >= MAX_BITS {
            let errors = lo
                .iter()
                .zip(&hi)
                .map(|(a, b)| to_f64(&(a - b)).abs())
                .collect();
            return Ok(Refined {
                values: hi.iter().map(to_f64).collect(),
                errors,
                bits: hi_bits,
            });
        }
        lo = hi;
        bits = hi_bits;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::bracket;

    #[test]
    fn brackets_match_binary64_formula() {
        for qp in [
            QParam::symmetric(0.35).unwrap(),
            QParam::symmetric(0.9).unwrap(),
            QParam::jackson(1.09).unwrap(),
            QParam::jackson(0.5).unwrap(),
            QParam::symmetric(1.0).unwrap(),
        ] {
            let mp = brackets(qp, 40, Prec(256));
            for (n, b) in mp.iter().enumerate() {
                let expect = bracket(n as u64, qp).unwrap();
                let got = to_f64(b);
                assert!(
                    (got - expect).abs() <= 1e-13 * expect.abs(),
                    "n={n} {qp:?}: {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn square_root_reaches_working_precision() {
        let p = Prec(512);
        let two = p.int(2);
        let s = sqrt(&two, p);
        let err = to_f64(&(&s * &s - &two)).abs();
        assert!(err < 1e-150, "{err}");
    }

    #[test]
    fn refine_recovers_cancelled_difference() {
        // (1 + 2^-100) - 1 is invisible in binary64 but exact at 128 bits
        let out = refine(|p| {
            let tiny = p.float((-100f64).exp2());
            Ok(vec![(p.one() + &tiny) - p.one()])
        })
        .unwrap();
        assert_eq!(out.values[0], (-100f64).exp2());
        assert_eq!(out.bits, 256);
    }

    #[test]
    fn refine_accepts_exact_zero() {
        let out = refine(|p| {
            let third = p.one() / p.int(3);
            Ok(vec![&third * p.int(3) - p.one()])
        })
        .unwrap();
        assert!(out.values[0].abs() < 1e-150);
    }
}
