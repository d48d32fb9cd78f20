//! Complex Newton polishing and argument-principle root counting.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::Func;
use crate::error::{QError, Result};
use crate::qnum::FunctionSpec;

pub(crate) struct Polished {
    pub z: Complex64,
    pub error: f64,
}

const MAX_ITER: usize = 100;

/// Damped Newton iteration from `z0`.
pub(crate) fn newton(func: &Func, z0: Complex64) -> Result<Polished> {
    let mut z = z0;
    for _ in 0..MAX_ITER {
        let v = func.eval(z, 0)?;
        let d = func.eval(z, 1)?.value;
        let g = v.value;
        let estimate = || (g.norm() + v.error_estimate()) / d.norm().max(f64::MIN_POSITIVE);
        if g.norm() <= v.error_estimate() {
            return Ok(Polished { z, error: estimate() });
        }
        if d.norm() == 0.0 {
            break;
        }
        let dz = g / d;
        let mut lambda = 1.0;
        let mut next = z - dz;
        while lambda > 1e-4 {
            match func.eval(next, 0) {
                Ok(w) if w.value.norm() < g.norm() => break,
                Ok(_) => {}
                Err(e) if !e.is_domain() => return Err(e),
                Err(_) => {}
            }
            lambda *= 0.5;
            next = z - dz * lambda;
        }
        if (dz * lambda).norm() <= 4.0 * f64::EPSILON * z.norm().max(f64::MIN_POSITIVE) {
            return Ok(Polished { z: next, error: estimate() });
        }
        z = next;
    }
    Err(QError::RootFinding(format!(
        "Newton iteration from {z0} did not converge (last iterate {z})"
    )))
}

/// Accumulated argument change of `func` along the path `t -> path(t)`,
/// `t` in `[0, 1]`, in units of full turns.
fn winding_along<P>(func: &Func, path: P, initial: usize) -> Result<f64>
where
    P: Fn(f64) -> Complex64,
{
    let at = |t: f64| -> Result<Complex64> {
        let v = func.eval(path(t), 0)?;
        if v.value.norm() <= v.error_estimate() {
            return Err(QError::Certification(format!(
                "function is within rounding of zero on the contour at {}",
                path(t)
            )));
        }
        Ok(v.value)
    };
    let mut total = 0.0;
    let mut stack = Vec::new();
    let mut t0 = 0.0;
    let mut v0 = at(0.0)?;
    for k in 1..=initial {
        let t1 = k as f64 / initial as f64;
        // the top of the stack is always the next point along the path
        stack.push((t1, at(t1)?));
        while let Some(&(t, v)) = stack.last() {
            let delta = (v / v0).arg();
            if delta.abs() > 0.5 && t - t0 > 1e-9 {
                let tm = 0.5 * (t0 + t);
                stack.push((tm, at(tm)?));
            } else {
                total += delta;
                t0 = t;
                v0 = v;
                stack.pop();
            }
        }
    }
    Ok(total / (2.0 * PI))
}

fn rounded_turns(turns: f64) -> Result<i64> {
    let n = turns.round();
    if (turns - n).abs() > 0.05 {
        return Err(QError::Certification(format!(
            "argument change {turns} turns is not an integer"
        )));
    }
    Ok(n as i64)
}

pub(crate) fn winding_rect(func: &Func, center: Complex64, half: f64) -> Result<i64> {
    let corners = [
        center + Complex64::new(half, -half),
        center + Complex64::new(half, half),
        center + Complex64::new(-half, half),
        center + Complex64::new(-half, -half),
    ];
    let mut turns = 0.0;
    for k in 0..4 {
        let (a, b) = (corners[k], corners[(k + 1) % 4]);
        turns += winding_along(func, |t| a + (b - a) * t, 16)?;
    }
    rounded_turns(turns)
}

pub(crate) fn winding_circle(func: &Func, radius: f64) -> Result<i64> {
    let turns = winding_along(
        func,
        |t| Complex64::from_polar(radius, 2.0 * PI * t),
        256,
    )?;
    rounded_turns(turns)
}

/// Winding number of `f^{(order)}` around a square of half-width `half`.
pub fn winding_number(spec: FunctionSpec, order: u32, center: Complex64, half: f64) -> Result<i64> {
    winding_rect(&Func::new(spec, order), center, half)
}

/// Number of roots of `f^{(order)}` inside `|z| < radius`.
pub fn count_in_disk(spec: FunctionSpec, order: u32, radius: f64) -> Result<i64> {
    winding_circle(&Func::new(spec, order), radius)
}

/// Winding number one on a square around `z` that excludes every other
/// known root (including the conjugate of `z`).
pub(crate) fn certify_simple(func: &Func, z: Complex64, others: &[Complex64]) -> Result<bool> {
    let scale = z.norm().max(1.0);
    let mut nearest = f64::INFINITY;
    for &w in others {
        let d = (w - z).norm();
        if d > 1e-12 * scale {
            nearest = nearest.min(d);
        }
    }
    if z.im != 0.0 {
        nearest = nearest.min(2.0 * z.im.abs());
    }
    let half = (0.3 * nearest).min(0.05 * scale);
    Ok(winding_rect(func, z, half)? == 1)
}
