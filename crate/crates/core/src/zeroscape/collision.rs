//! Deformation values at which a pair of real roots merges.
//!
//! A pair is followed upward in `q` from the all-real regime. The predicate
//! "pair still real" counts real roots in a window localized around the last
//! known positions of the pair. The bracket where the count drops is bisected
//! and then refined by Newton on `g = g' = 0` in `(x, q)`.

use serde::{Deserialize, Serialize};

use super::scan::{extremum, scan_real};
use super::{check_continuable, default_window, Func, CONTINUATION_START_Q};
use crate::error::{QError, Result};
use crate::qnum::{Convention, Family, FunctionSpec};

/// Which pair collides, counted from the origin (pair `i` holds roots
/// `2i - 1` and `2i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollisionKind {
    ZeroPair(usize),
    TurningPair(usize),
}

impl CollisionKind {
    fn order(self) -> u32 {
        match self {
            CollisionKind::ZeroPair(_) => 0,
            CollisionKind::TurningPair(_) => 1,
        }
    }

    fn pair(self) -> usize {
        match self {
            CollisionKind::ZeroPair(i) | CollisionKind::TurningPair(i) => i,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionResult {
    pub q_star: f64,
    /// Abscissa where the pair meets.
    pub location: f64,
    pub kind: CollisionKind,
    /// Width of the final bisection bracket in `q`.
    pub bracket_width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollisionOutcome {
    Collision(CollisionResult),
    /// The pair stayed real over the whole sampled range.
    NoCollision { q_min: f64, q_max: f64 },
}

const COARSE_STEP: f64 = 0.01;
const BRACKET_WIDTH: f64 = 1e-5;
const FD_STEP: f64 = 1e-6;
const Q_MAX: f64 = 1.0;

/// Last known positions of the pair while it is real.
#[derive(Debug, Clone, Copy)]
struct PairState {
    q: f64,
    left: f64,
    right: f64,
}

impl PairState {
    fn window(&self) -> (f64, f64) {
        let s = self.right - self.left;
        (self.left - 0.25 * s, (self.right + 0.25 * s).min(-1e-6))
    }
}

/// The pair at `q` if it is still real and distinct.
fn pair_at(base: &Func, prev: &PairState, q: f64) -> Result<Option<PairState>> {
    let func = base.at_q(q)?;
    let (a, b) = prev.window();
    let roots = scan_real(&func, a, b)?.roots;
    if roots.len() < 2 {
        return Ok(None);
    }
    let mid = 0.5 * (prev.left + prev.right);
    let mut xs: Vec<f64> = roots.iter().map(|r| r.0).collect();
    xs.sort_by(|p, r| (p - mid).abs().total_cmp(&(r - mid).abs()));
    let (left, right) = if xs[0] < xs[1] { (xs[0], xs[1]) } else { (xs[1], xs[0]) };
    Ok(Some(PairState { q, left, right }))
}

fn initial_pair(base: &Func, pair: usize) -> Result<PairState> {
    if pair == 0 {
        return Err(QError::IndexOutOfRange("pair indices start at 1".into()));
    }
    let q = CONTINUATION_START_Q;
    let func = base.at_q(q)?;
    let window = default_window(func.spec());
    let mut roots: Vec<f64> = scan_real(&func, window.0, window.1)?.roots.iter().map(|r| r.0).collect();
    roots.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    if roots.len() < 2 * pair {
        return Err(QError::InsufficientZeros(format!(
            "only {} real roots at q = {q}, pair {pair} needs {}",
            roots.len(),
            2 * pair
        )));
    }
    let (x1, x2) = (roots[2 * pair - 2], roots[2 * pair - 1]);
    Ok(PairState {
        q,
        left: x1.min(x2),
        right: x1.max(x2),
    })
}

/// Step upward from `state` until the pair vanishes; returns the last real
/// state and the first `q` where it was gone.
fn coarse(base: &Func, mut state: PairState, step: f64) -> Result<Option<(PairState, f64)>> {
    while state.q < Q_MAX {
        let q = (state.q + step).min(Q_MAX);
        match pair_at(base, &state, q)? {
            Some(next) => state = next,
            None => return Ok(Some((state, q))),
        }
    }
    Ok(None)
}

fn bisect(base: &Func, mut lo: PairState, mut hi: f64) -> Result<(PairState, f64)> {
    while hi - lo.q > BRACKET_WIDTH {
        let mid = 0.5 * (lo.q + hi);
        match pair_at(base, &lo, mid)? {
            Some(next) => lo = next,
            None => hi = mid,
        }
    }
    Ok((lo, hi))
}

/// Newton on `(g, g') = 0` in `(x, q)`.
fn refine(base: &Func, mut x: f64, mut q: f64) -> Option<(f64, f64)> {
    let eval = |x: f64, q: f64| -> Result<[f64; 3]> {
        let f = base.at_q(q)?;
        Ok([f.real(x, 0)?.0, f.real(x, 1)?.0, f.real(x, 2)?.0])
    };
    for _ in 0..30 {
        let [g, g1, g2] = eval(x, q).ok()?;
        let [gp, g1p, _] = eval(x, q + FD_STEP).ok()?;
        let [gm, g1m, _] = eval(x, q - FD_STEP).ok()?;
        let gq = (gp - gm) / (2.0 * FD_STEP);
        let g1q = (g1p - g1m) / (2.0 * FD_STEP);
        // Jacobian [[g1, gq], [g2, g1q]]
        let det = g1 * g1q - gq * g2;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dx = (g * g1q - gq * g1) / det;
        let dq = (g1 * g1 - g * g2) / det;
        x -= dx;
        q -= dq;
        if !(q > 0.0 && q < 1.0) {
            return None;
        }
        if dx.abs() <= 1e-13 * x.abs().max(1.0) && dq.abs() <= 1e-13 {
            return Some((x, q));
        }
    }
    None
}

fn symmetric_collision(spec: FunctionSpec, kind: CollisionKind) -> Result<CollisionOutcome> {
    let base = Func::new(spec, kind.order());
    let start = initial_pair(&base, kind.pair())?;
    let mut from = start;
    let mut retried = false;
    loop {
        let Some((lo, hi)) = coarse(&base, from, COARSE_STEP)? else {
            return Ok(CollisionOutcome::NoCollision {
                q_min: CONTINUATION_START_Q,
                q_max: Q_MAX,
            });
        };
        let (lo, hi) = bisect(&base, lo, hi)?;
        // the pair must stay complex just above the bracket
        let check = (hi + COARSE_STEP).min(Q_MAX);
        if let Some(again) = pair_at(&base, &lo, check)? {
            if retried {
                return Err(QError::Collision(format!(
                    "pair {} is real again at q = {check} after vanishing near {hi}",
                    kind.pair()
                )));
            }
            retried = true;
            from = again;
            continue;
        }
        let func = base.at_q(lo.q)?;
        let (d_lo, _) = func.real(lo.left, 1)?;
        let tau = extremum(&func, lo.left, lo.right, d_lo)?;
        let q_mid = 0.5 * (lo.q + hi);
        let width = hi - lo.q;
        let (q_star, location) = match refine(&base, tau, q_mid) {
            Some((x, q)) if (q - q_mid).abs() <= width && x > lo.left - (lo.right - lo.left) && x < lo.right + (lo.right - lo.left) => (q, x),
            _ => (q_mid, tau),
        };
        return Ok(CollisionOutcome::Collision(CollisionResult {
            q_star,
            location,
            kind,
            bracket_width: width,
        }));
    }
}

/// Jackson zeros for `q > 1` sit at `q^i/(1-q)`: check they stay real and
/// distinct by counting them on sampled deformations.
fn jackson_no_collision(spec: FunctionSpec, kind: CollisionKind) -> Result<CollisionOutcome> {
    let (q_min, q_max) = (1.1f64, 10.0f64);
    let needed = 2 * kind.pair() + 1;
    let samples = 40;
    for k in 0..=samples {
        let q = q_min * (q_max / q_min).powf(k as f64 / samples as f64);
        let func = Func::new(spec.with_q(q)?, kind.order());
        let reach = q.powf(needed as f64 + 0.5) / (q - 1.0);
        let count = scan_real(&func, -reach, -1e-3)?.roots.len();
        if count < needed {
            return Ok(CollisionOutcome::Collision(CollisionResult {
                q_star: q,
                location: f64::NAN,
                kind,
                bracket_width: f64::NAN,
            }));
        }
    }
    Ok(CollisionOutcome::NoCollision { q_min, q_max })
}

/// First deformation at which the chosen pair of real roots collides.
///
/// Symmetric specs are followed over `0.1 <= q <= 1`; Jackson specs are
/// sampled over `1.1 <= q <= 10`. The `q` of `spec` itself is ignored.
pub fn collision_point(spec: FunctionSpec, kind: CollisionKind) -> Result<CollisionOutcome> {
    match spec.qp.convention() {
        Convention::Symmetric => {
            check_continuable(spec)?;
            symmetric_collision(spec, kind)
        }
        Convention::Jackson => {
            if !matches!(spec.family, Family::Exp | Family::ExpDerivative(_)) {
                return Err(QError::MethodMismatch {
                    method: "collision".into(),
                    family: spec.family.to_string(),
                });
            }
            if kind.pair() == 0 {
                return Err(QError::IndexOutOfRange("pair indices start at 1".into()));
            }
            jackson_no_collision(spec, kind)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::QParam;

    fn sym() -> FunctionSpec {
        FunctionSpec::exp(QParam::symmetric(0.3).unwrap())
    }

    #[test]
    fn zero_pair_collides_near_014() {
        let CollisionOutcome::Collision(r) = collision_point(sym(), CollisionKind::ZeroPair(1)).unwrap() else {
            panic!("no collision")
        };
        assert!((r.q_star - 0.14).abs() < 0.01, "{r:?}");
        assert!(r.bracket_width <= 1e-4);
    }

    #[test]
    fn turning_pair_collides_near_025() {
        let CollisionOutcome::Collision(r) = collision_point(sym(), CollisionKind::TurningPair(1)).unwrap() else {
            panic!("no collision")
        };
        assert!((r.q_star - 0.25).abs() < 0.01, "{r:?}");
    }

    #[test]
    fn jackson_zeros_never_collide() {
        let spec = FunctionSpec::exp(QParam::jackson(2.0).unwrap());
        let out = collision_point(spec, CollisionKind::ZeroPair(1)).unwrap();
        assert!(matches!(out, CollisionOutcome::NoCollision { .. }));
    }
}
