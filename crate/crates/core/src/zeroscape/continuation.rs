//! Predictor-corrector continuation of all roots in `q`.
//!
//! Real roots are re-scanned at every step and matched to their predecessors.
//! Complex roots (upper half-plane representatives) are followed by Newton from
//! a linear predictor. When two adjacent real roots vanish between steps they
//! have collided, and the new complex root is seeded from the extremum that
//! separated them using the local quadratic model
//! `g(tau + iy) ~ g(tau) - g''(tau) y^2 / 2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::newton::newton;
use super::scan::{extremum, scan_real};
use super::{check_continuable, default_window, Func, RootKind, CONTINUATION_START_Q};
use crate::error::{QError, Result};
use crate::qnum::FunctionSpec;

#[derive(Debug, Clone, Copy)]
pub(crate) struct RealRoot {
    pub id: usize,
    pub x: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ComplexRoot {
    pub id: usize,
    pub z: Complex64,
    pub error: f64,
    previous: Option<(f64, Complex64)>,
}

#[derive(Debug, Clone)]
pub(crate) struct Snapshot {
    pub q: f64,
    pub real: Vec<RealRoot>,
    pub complex: Vec<ComplexRoot>,
}

/// One root at one accepted value of `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub q: f64,
    /// Stable identity of the root along the trajectory; both members of a
    /// conjugate pair share it.
    pub id: usize,
    pub location: Complex64,
    pub kind: RootKind,
}

/// Two real roots merged into a conjugate pair (or a pair returned to the axis).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub q_before: f64,
    pub q_after: f64,
    /// Identities of the two real roots.
    pub real_ids: (usize, usize),
    /// Identity of the conjugate pair.
    pub pair_id: usize,
    /// Approximate abscissa of the meeting point.
    pub location: f64,
    /// `true` for real -> complex, `false` for complex -> real.
    pub into_complex: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub spec: FunctionSpec,
    /// Derivative order whose roots are followed (0 zeros, 1 turning points).
    pub order: u32,
    pub rows: Vec<TrajectoryRow>,
    pub events: Vec<CollisionEvent>,
    /// Last value of `q` reached.
    pub q_reached: f64,
    /// Continuation stopped early because the step fell below its floor.
    pub truncated: bool,
}

const MIN_STEP: f64 = 1e-7;

struct Tracker {
    base: Func,
    window: (f64, f64),
    next_id: usize,
}

fn nearest(points: &[f64], x: f64) -> Option<usize> {
    points
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - x).abs().total_cmp(&(b.1 - x).abs()))
        .map(|(i, _)| i)
}

impl Tracker {
    fn fresh_id(&mut self) -> usize {
        self.next_id += 1;
        self.next_id - 1
    }

    fn near_edge(&self, x: f64) -> bool {
        let (a, b) = self.window;
        x - a < 0.1 * a.abs().max(1.0) || b - x < 0.01 * b.abs().max(1.0)
    }

    fn initial(&mut self, q: f64) -> Result<Snapshot> {
        let func = self.base.at_q(q)?;
        let real = scan_real(&func, self.window.0, self.window.1)?
            .roots
            .into_iter()
            .map(|(x, error)| RealRoot {
                id: self.fresh_id(),
                x,
                error,
            })
            .collect();
        Ok(Snapshot {
            q,
            real,
            complex: Vec::new(),
        })
    }

    /// Attempt one step; `Ok(None)` asks for a smaller step.
    fn step(&mut self, snap: &Snapshot, q: f64) -> Result<Option<(Snapshot, Vec<CollisionEvent>)>> {
        let func = self.base.at_q(q)?;
        let mut events = Vec::new();

        // complex roots: predictor then Newton
        let mut complex = Vec::new();
        let mut landings: Vec<(usize, f64)> = Vec::new();
        for (k, c) in snap.complex.iter().enumerate() {
            let predicted = match c.previous {
                Some((q_prev, z_prev)) if q_prev != snap.q => {
                    c.z + (c.z - z_prev) * ((q - snap.q) / (snap.q - q_prev))
                }
                _ => c.z,
            };
            let Ok(polished) = newton(&func, predicted) else {
                return Ok(None);
            };
            let z = if polished.z.im < 0.0 { polished.z.conj() } else { polished.z };
            // guard against jumping onto a different root
            let mut spacing = 2.0 * c.z.im;
            for (j, other) in snap.complex.iter().enumerate() {
                if j != k {
                    spacing = spacing.min((other.z - c.z).norm());
                }
            }
            for r in &snap.real {
                spacing = spacing.min((Complex64::new(r.x, 0.0) - c.z).norm());
            }
            if (z - c.z).norm() > 0.5 * spacing.max(1e-12) {
                return Ok(None);
            }
            if z.im <= 1e-9 * z.norm() {
                landings.push((c.id, z.re));
                continue;
            }
            complex.push(ComplexRoot {
                id: c.id,
                z,
                error: polished.error,
                previous: Some((snap.q, c.z)),
            });
        }

        // real roots: rescan and match
        let found = scan_real(&func, self.window.0, self.window.1)?.roots;
        let old: Vec<f64> = snap.real.iter().map(|r| r.x).collect();
        let new: Vec<f64> = found.iter().map(|r| r.0).collect();
        let mut old_match = vec![None; old.len()];
        let mut new_match = vec![None; new.len()];
        for (i, &x) in old.iter().enumerate() {
            let Some(j) = nearest(&new, x) else { continue };
            if nearest(&old, new[j]) != Some(i) {
                continue;
            }
            let mut gap = x.abs().max(1e-3);
            if i > 0 {
                gap = gap.min(x - old[i - 1]);
            }
            if i + 1 < old.len() {
                gap = gap.min(old[i + 1] - x);
            }
            if (new[j] - x).abs() < 0.5 * gap {
                old_match[i] = Some(j);
                new_match[j] = Some(i);
            }
        }

        // vanished real roots must be adjacent pairs or leave through an edge
        let mut seeds = Vec::new();
        let mut i = 0;
        while i < old.len() {
            if old_match[i].is_some() {
                i += 1;
                continue;
            }
            if i + 1 < old.len() && old_match[i + 1].is_none() {
                seeds.push((i, i + 1));
                i += 2;
            } else if self.near_edge(old[i]) {
                i += 1;
            } else {
                return Ok(None);
            }
        }
        for (a, b) in seeds {
            let (xa, xb) = (old[a], old[b]);
            let Some(z) = seed_pair(&func, xa, xb)? else {
                return Ok(None);
            };
            if complex.iter().any(|c| (c.z - z.z).norm() <= 1e-8 * z.z.norm()) {
                return Ok(None);
            }
            let id = self.fresh_id();
            events.push(CollisionEvent {
                q_before: snap.q,
                q_after: q,
                real_ids: (snap.real[a].id, snap.real[b].id),
                pair_id: id,
                location: 0.5 * (xa + xb),
                into_complex: true,
            });
            complex.push(ComplexRoot {
                id,
                z: z.z,
                error: z.error,
                previous: None,
            });
        }

        // appeared real roots: through an edge, or two per landed pair
        let mut real = Vec::with_capacity(new.len());
        let mut landing_budget: Vec<(usize, f64, usize, Vec<usize>)> =
            landings.iter().map(|&(id, x)| (id, x, 2, Vec::new())).collect();
        for (j, &(x, error)) in found.iter().enumerate() {
            let id = match new_match[j] {
                Some(i) => snap.real[i].id,
                None => {
                    let landed = landing_budget
                        .iter_mut()
                        .find(|(_, lx, left, _)| *left > 0 && (x - lx).abs() <= 0.1 * lx.abs().max(1e-3));
                    if let Some((_, _, left, ids)) = landed {
                        *left -= 1;
                        let id = self.fresh_id();
                        ids.push(id);
                        id
                    } else if self.near_edge(x) {
                        self.fresh_id()
                    } else {
                        return Ok(None);
                    }
                }
            };
            real.push(RealRoot { id, x, error });
        }
        for (pair_id, x, left, ids) in landing_budget {
            if left != 0 {
                return Ok(None);
            }
            events.push(CollisionEvent {
                q_before: snap.q,
                q_after: q,
                real_ids: (ids[0], ids[1]),
                pair_id,
                location: x,
                into_complex: false,
            });
        }
        Ok(Some((Snapshot { q, real, complex }, events)))
    }
}

/// Complex root born from the real pair `xa < xb` that has just vanished.
fn seed_pair(func: &Func, xa: f64, xb: f64) -> Result<Option<super::newton::Polished>> {
    let s = xb - xa;
    let (lo, hi) = (xa - 0.5 * s, xb + 0.5 * s);
    let (d_lo, _) = func.real(lo, 1)?;
    let (d_hi, _) = func.real(hi, 1)?;
    if d_lo * d_hi >= 0.0 {
        return Ok(None);
    }
    let tau = extremum(func, lo, hi, d_lo)?;
    let (g, _) = func.real(tau, 0)?;
    let (g2, _) = func.real(tau, 2)?;
    if g * g2 <= 0.0 {
        return Ok(None);
    }
    let y = (2.0 * g / g2).sqrt();
    let Ok(p) = newton(func, Complex64::new(tau, y)) else {
        return Ok(None);
    };
    let z = if p.z.im < 0.0 { p.z.conj() } else { p.z };
    if z.im <= 1e-9 * z.norm() || (z - tau).norm() > 2.0 * s + y {
        return Ok(None);
    }
    Ok(Some(super::newton::Polished { z, error: p.error }))
}

fn rows_of(snap: &Snapshot) -> Vec<TrajectoryRow> {
    let mut rows = Vec::new();
    for r in &snap.real {
        rows.push(TrajectoryRow {
            q: snap.q,
            id: r.id,
            location: Complex64::new(r.x, 0.0),
            kind: RootKind::RealAxis,
        });
    }
    for c in &snap.complex {
        for (location, kind) in [
            (c.z, RootKind::ConjugatePairUpper),
            (c.z.conj(), RootKind::ConjugatePairLower),
        ] {
            rows.push(TrajectoryRow {
                q: snap.q,
                id: c.id,
                location,
                kind,
            });
        }
    }
    rows
}

struct Run {
    snap: Snapshot,
    rows: Vec<TrajectoryRow>,
    events: Vec<CollisionEvent>,
    truncated: bool,
}

fn run(tracker: &mut Tracker, start: Snapshot, q_to: f64, dq_max: f64, record: bool) -> Result<Run> {
    let mut snap = start;
    let mut rows = if record { rows_of(&snap) } else { Vec::new() };
    let mut events = Vec::new();
    let direction = (q_to - snap.q).signum();
    let mut dq = dq_max;
    while (q_to - snap.q) * direction > 0.0 {
        let q_next = if (q_to - snap.q).abs() <= dq * 1.000001 {
            q_to
        } else {
            snap.q + direction * dq
        };
        match tracker.step(&snap, q_next)? {
            Some((next, ev)) => {
                snap = next;
                events.extend(ev);
                if record {
                    rows.extend(rows_of(&snap));
                }
                dq = (2.0 * dq).min(dq_max);
            }
            None => {
                dq *= 0.5;
                if dq < MIN_STEP {
                    return Ok(Run {
                        snap,
                        rows,
                        events,
                        truncated: true,
                    });
                }
            }
        }
    }
    Ok(Run {
        snap,
        rows,
        events,
        truncated: false,
    })
}

/// Roots of `func` at `q_to`, followed from `q_from` where all are real.
pub(crate) fn track(func: &Func, window: (f64, f64), q_from: f64, q_to: f64) -> Result<Snapshot> {
    let mut tracker = Tracker {
        base: *func,
        window,
        next_id: 1,
    };
    let start = tracker.initial(q_from)?;
    let out = run(&mut tracker, start, q_to, 0.01, false)?;
    if out.truncated {
        return Err(QError::RootFinding(format!(
            "continuation stalled at q = {} before reaching {q_to}",
            out.snap.q
        )));
    }
    Ok(out.snap)
}

/// Follow every zero (`order = 0`) or turning point (`order = 1`) of `spec`
/// in the default window from `q_from` to `q_to` with at least `steps` steps.
///
/// Roots are taken at `q_from` by first following them from the all-real
/// regime at small `q` when needed.
pub fn continue_in_q(spec: FunctionSpec, order: u32, q_from: f64, q_to: f64, steps: usize) -> Result<Trajectory> {
    check_continuable(spec)?;
    for q in [q_from, q_to] {
        if !(q > 0.0 && q <= 1.0) {
            return Err(QError::InvalidArgument(format!(
                "continuation runs over 0 < q <= 1, got {q}"
            )));
        }
    }
    if steps == 0 {
        return Err(QError::InvalidArgument("steps must be positive".into()));
    }
    let reach = spec.with_q(q_from.min(q_to))?;
    let window = default_window(reach);
    let func = Func::new(spec, order);
    let mut tracker = Tracker {
        base: func,
        window,
        next_id: 1,
    };
    let mut start = tracker.initial(q_from.min(CONTINUATION_START_Q))?;
    if q_from > CONTINUATION_START_Q {
        let warmup = run(&mut tracker, start, q_from, 0.01, false)?;
        if warmup.truncated {
            return Err(QError::RootFinding(format!(
                "continuation stalled at q = {} before reaching {q_from}",
                warmup.snap.q
            )));
        }
        start = warmup.snap;
    } else if q_from < CONTINUATION_START_Q {
        start = tracker.initial(q_from)?;
    }
    let dq_max = (q_to - q_from).abs() / steps as f64;
    let out = run(&mut tracker, start, q_to, dq_max.max(MIN_STEP), true)?;
    Ok(Trajectory {
        spec: spec.with_q(out.snap.q)?,
        order,
        rows: out.rows,
        events: out.events,
        q_reached: out.snap.q,
        truncated: out.truncated,
    })
}
