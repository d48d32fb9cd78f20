//! Sign scan for real roots.
//!
//! The function and its derivative are sampled together. A sign change of the
//! function brackets a root; a sign change of the derivative alone marks an
//! extremum whose value decides whether a close pair of roots hides between
//! two samples.

use super::Func;
use crate::error::Result;

pub(crate) struct RealScan {
    /// `(x, location error)` in increasing `x`.
    pub roots: Vec<(f64, f64)>,
    pub degenerate: Vec<f64>,
}

#[derive(Clone, Copy)]
struct Sample {
    x: f64,
    g: f64,
    d: f64,
}

const MAX_DEPTH: u32 = 10;

fn sample(func: &Func, x: f64) -> Result<Sample> {
    Ok(Sample {
        x,
        g: func.real(x, 0)?.0,
        d: func.real(x, 1)?.0,
    })
}

/// Grid spacing: relative to `|x|` because root spacing grows geometrically.
pub(crate) fn scan_step(x: f64) -> f64 {
    (x.abs() / 50.0).max(0.01)
}

pub(crate) fn scan_real(func: &Func, a: f64, b: f64) -> Result<RealScan> {
    let mut out = RealScan {
        roots: Vec::new(),
        degenerate: Vec::new(),
    };
    let cap = (b - a) / 8.0;
    let mut prev = sample(func, a)?;
    if prev.g == 0.0 {
        out.roots.push((a, 0.0));
    }
    while prev.x < b {
        let x = (prev.x + scan_step(prev.x).min(cap)).min(b);
        let next = sample(func, x)?;
        if next.g == 0.0 {
            out.roots.push((x, 0.0));
        }
        examine(func, prev, next, 0, &mut out)?;
        prev = next;
    }
    out.roots.sort_by(|p, q| p.0.total_cmp(&q.0));
    out.roots.dedup_by(|p, q| (p.0 - q.0).abs() <= 4.0 * f64::EPSILON * p.0.abs().max(1e-300));
    Ok(out)
}

fn examine(func: &Func, s0: Sample, s1: Sample, depth: u32, out: &mut RealScan) -> Result<()> {
    let sign_change = s0.g * s1.g < 0.0;
    let slope_change = s0.d * s1.d < 0.0;
    match (sign_change, slope_change) {
        (true, false) => out.roots.push(polish(func, s0.x, s1.x, s0.g)?),
        (true, true) if depth >= MAX_DEPTH => out.roots.push(polish(func, s0.x, s1.x, s0.g)?),
        (true, true) => {
            // a root plus an extremum: split until they separate
            let mut left = s0;
            for k in 1..=4 {
                let right = if k == 4 {
                    s1
                } else {
                    sample(func, s0.x + (s1.x - s0.x) * k as f64 / 4.0)?
                };
                if right.g == 0.0 && k < 4 {
                    out.roots.push((right.x, 0.0));
                }
                examine(func, left, right, depth + 1, out)?;
                left = right;
            }
        }
        (false, true) => {
            let tau = extremum(func, s0.x, s1.x, s0.d)?;
            let (g, err) = func.real(tau, 0)?;
            if g.abs() <= err {
                out.degenerate.push(tau);
            } else if g * s0.g < 0.0 {
                out.roots.push(polish(func, s0.x, tau, s0.g)?);
                out.roots.push(polish(func, tau, s1.x, g)?);
            }
        }
        (false, false) => {}
    }
    Ok(())
}

/// Zero of the derivative inside `[lo, hi]` where it changes sign.
pub(crate) fn extremum(func: &Func, mut lo: f64, mut hi: f64, d_lo: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let d = func.real(mid, 1)?.0;
        if d == 0.0 {
            return Ok(mid);
        }
        if (d < 0.0) == (d_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Safeguarded Newton inside a sign-change bracket; returns the root and an
/// error estimate `(|g| + rounding) / |g'|`.
pub(crate) fn polish(func: &Func, mut lo: f64, mut hi: f64, g_lo: f64) -> Result<(f64, f64)> {
    let negative_at_lo = g_lo < 0.0;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (g, g_err) = func.real(x, 0)?;
        if g == 0.0 {
            return Ok((x, 0.0));
        }
        if (g < 0.0) == negative_at_lo {
            lo = x;
        } else {
            hi = x;
        }
        let (d, _) = func.real(x, 1)?;
        let width = hi - lo;
        if g.abs() <= g_err || width <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            return Ok((x, (g.abs() + g_err) / d.abs().max(f64::MIN_POSITIVE)));
        }
        let newton = x - g / d;
        let step_ok = d != 0.0 && newton > lo && newton < hi;
        let next = if step_ok { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs() {
            return Ok((next, (g.abs() + g_err) / d.abs().max(f64::MIN_POSITIVE)));
        }
        x = next;
    }
    let (g, g_err) = func.real(x, 0)?;
    let (d, _) = func.real(x, 1)?;
    Ok((x, ((g.abs() + g_err) / d.abs().max(f64::MIN_POSITIVE)).max(hi - lo)))
}
