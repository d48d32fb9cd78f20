//! Zeros and turning points of the family members, their motion in `q`, the
//! collision points where real pairs turn complex, and zero-level contours.
//!
//! Real roots come from a sign scan of `f` and `f'` on the axis. Complex roots
//! are never searched for globally: they are followed from the moment a real
//! pair collides, which is how they appear as `q` increases from small values.

mod collision;
mod continuation;
mod contour;
mod newton;
mod scan;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QError, Result};
use crate::qnum::{Convention, Family, FunctionSpec, Series, TruncatedValue, WORKING_TOL};

pub use collision::{collision_point, CollisionKind, CollisionOutcome, CollisionResult};
pub use continuation::{continue_in_q, CollisionEvent, Trajectory, TrajectoryRow};
pub use contour::{extract_contours, ContourField, ContourSet, Window};
pub use newton::{count_in_disk, winding_number};
pub(crate) use newton::winding_circle;

/// Deformation at which every zero and turning point of `e_q` is still real.
pub const CONTINUATION_START_Q: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootKind {
    RealAxis,
    ConjugatePairUpper,
    ConjugatePairLower,
}

impl RootKind {
    fn of(z: Complex64) -> Self {
        if z.im > 0.0 {
            RootKind::ConjugatePairUpper
        } else if z.im < 0.0 {
            RootKind::ConjugatePairLower
        } else {
            RootKind::RealAxis
        }
    }
}

/// A located zero of `f` (or of `f'` inside a [`TurningPointRecord`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    /// Position in the list ordered by modulus, starting at 1.
    pub index: usize,
    pub location: Complex64,
    pub kind: RootKind,
    /// `|f(location)|`.
    pub residual: f64,
    /// Largest of `|f|` on a unit neighbourhood, the scale for `residual`.
    pub local_scale: f64,
    /// Estimated distance to the exact root.
    pub location_error: f64,
    /// Winding number one on a small rectangle around the root.
    pub certified: bool,
    pub spec: FunctionSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPointRecord {
    pub root: ZeroRecord,
    /// `f` at the turning point: a square-root branch point of the inverse.
    pub branch_value: Complex64,
}

/// Real zeros found on a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealZeros {
    pub zeros: Vec<ZeroRecord>,
    /// More roots were present than `max_count`.
    pub truncated: bool,
    /// Extrema where `|f|` sat within rounding of zero, so a close pair (or
    /// none) could not be resolved.
    pub near_degenerate: Vec<f64>,
}

/// `f^{(order)}` of one family member, with its first two derivatives.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Func {
    series: Series,
    order: u32,
}

impl Func {
    pub fn new(spec: FunctionSpec, order: u32) -> Self {
        Self {
            series: Series::new(spec),
            order,
        }
    }

    pub fn spec(&self) -> FunctionSpec {
        self.series.spec()
    }

    pub fn at_q(&self, q: f64) -> Result<Self> {
        Ok(Self::new(self.spec().with_q(q)?, self.order))
    }

    /// `extra`-th derivative of the tracked function.
    pub fn eval(&self, z: Complex64, extra: u32) -> Result<TruncatedValue> {
        let v = self.series.eval_derivative(z, self.order + extra, WORKING_TOL)?;
        // Jackson zeros for q > 1 sit where the terms cancel to a few digits
        if self.spec().qp.convention() == Convention::Jackson && v.error_estimate() > 1e-6 * v.value.norm() {
            let (value, error, terms_used) = crate::precise::series_complex(self.spec(), z, self.order + extra);
            return Ok(TruncatedValue {
                value,
                tail_bound: 0.0,
                terms_used,
                rounding_estimate: error,
            });
        }
        Ok(v)
    }

    pub fn value(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval(z, 0)?.value)
    }

    pub fn real(&self, x: f64, extra: u32) -> Result<(f64, f64)> {
        let v = self.eval(Complex64::new(x, 0.0), extra)?;
        Ok((v.value.re, v.error_estimate()))
    }

    fn local_scale(&self, z: Complex64) -> Result<f64> {
        let mut scale = 0.0f64;
        for d in [
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(-0.5, 0.0),
        ] {
            match self.eval(z + d, 0) {
                Ok(v) => scale = scale.max(v.value.norm()),
                Err(e) if e.is_domain() => {}
                Err(e) => return Err(e),
            }
        }
        Ok(scale)
    }
}

fn record(func: &Func, z: Complex64, location_error: f64, others: &[Complex64]) -> Result<ZeroRecord> {
    let residual = func.eval(z, 0)?.value.norm();
    let certified = newton::certify_simple(func, z, others).unwrap_or(false);
    Ok(ZeroRecord {
        index: 0,
        location: z,
        kind: RootKind::of(z),
        residual,
        local_scale: func.local_scale(z)?,
        location_error,
        certified,
        spec: func.spec(),
    })
}

fn sort_and_index(records: &mut [ZeroRecord]) {
    records.sort_by(|a, b| {
        a.location
            .norm()
            .total_cmp(&b.location.norm())
            .then(b.location.im.total_cmp(&a.location.im))
    });
    for (i, r) in records.iter_mut().enumerate() {
        r.index = i + 1;
    }
}

/// Certify and order a set of roots of `func`; complex entries are upper
/// representatives whose conjugates are added.
fn finish_roots(func: &Func, real: &[(f64, f64)], upper: &[(Complex64, f64)]) -> Result<Vec<ZeroRecord>> {
    let mut all: Vec<Complex64> = real.iter().map(|&(x, _)| Complex64::new(x, 0.0)).collect();
    for (z, _) in upper {
        all.push(*z);
        all.push(z.conj());
    }
    let mut out = Vec::with_capacity(all.len());
    for &(x, err) in real {
        let z = Complex64::new(x, 0.0);
        out.push(record(func, z, err, &all)?);
    }
    for &(z, err) in upper {
        let up = record(func, z, err, &all)?;
        let mut low = up;
        low.location = z.conj();
        low.kind = RootKind::ConjugatePairLower;
        out.push(up);
        out.push(low);
    }
    sort_and_index(&mut out);
    Ok(out)
}

/// Real zeros of `spec` on `[x_min, x_max]`, ordered by modulus.
pub fn find_real_zeros(spec: FunctionSpec, x_min: f64, x_max: f64, max_count: usize) -> Result<RealZeros> {
    find_real_roots(&Func::new(spec, 0), x_min, x_max, max_count)
}

fn find_real_roots(func: &Func, x_min: f64, x_max: f64, max_count: usize) -> Result<RealZeros> {
    if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
        return Err(QError::InvalidArgument(format!(
            "window [{x_min}, {x_max}] is empty or not finite"
        )));
    }
    let found = scan::scan_real(func, x_min, x_max)?;
    let mut roots = found.roots;
    roots.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()));
    let truncated = roots.len() > max_count;
    roots.truncate(max_count);
    let zeros = finish_roots(func, &roots, &[])?;
    Ok(RealZeros {
        zeros,
        truncated,
        near_degenerate: found.degenerate,
    })
}

/// How complex roots are seeded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedStrategy {
    /// Follow every real pair from small `q` through its collision.
    Continuation,
    /// Polish caller-provided starting points.
    Seeds(Vec<Complex64>),
}

/// Default real window for continuation, sized from the roots of the target.
fn default_window(spec: FunctionSpec) -> (f64, f64) {
    let q = spec.qp.q();
    // moduli grow roughly like q^{-k/2}; 40 of them fit comfortably
    let reach = (5.0 * (1.0 / q).sqrt().powi(40)).clamp(50.0, 1e6);
    (-reach, -1e-3)
}

fn check_continuable(spec: FunctionSpec) -> Result<()> {
    if matches!(spec.family, Family::Cos | Family::Sin) || spec.qp.convention() != Convention::Symmetric {
        return Err(QError::InvalidArgument(format!(
            "continuation follows the symmetric exponential family, not {} ({})",
            spec.family,
            spec.qp.convention()
        )));
    }
    Ok(())
}

/// Complex roots of `f^{(order)}`: upper representatives plus conjugates.
fn complex_roots(func: &Func, strategy: &SeedStrategy) -> Result<Vec<(Complex64, f64)>> {
    match strategy {
        SeedStrategy::Seeds(seeds) => {
            let mut out: Vec<(Complex64, f64)> = Vec::new();
            for &seed in seeds {
                let polished = newton::newton(func, seed)?;
                let z = if polished.z.im < 0.0 { polished.z.conj() } else { polished.z };
                if z.im.abs() <= 1e-12 * z.norm() {
                    continue;
                }
                if out.iter().all(|(w, _)| (w - z).norm() > 1e-8 * z.norm().max(1.0)) {
                    out.push((z, polished.error));
                }
            }
            Ok(out)
        }
        SeedStrategy::Continuation => {
            let spec = func.spec();
            check_continuable(spec)?;
            let q = spec.qp.q();
            if q <= CONTINUATION_START_Q {
                return Ok(Vec::new());
            }
            let snap = continuation::track(func, default_window(spec), CONTINUATION_START_Q, q)?;
            Ok(snap.complex.iter().map(|c| (c.z, c.error)).collect())
        }
    }
}

/// Complex zeros (both members of every pair), ordered by modulus.
pub fn find_complex_zeros(spec: FunctionSpec, strategy: &SeedStrategy, count: usize) -> Result<Vec<ZeroRecord>> {
    let func = Func::new(spec, 0);
    let upper = complex_roots(&func, strategy)?;
    let mut out = finish_roots(&func, &[], &upper)?;
    out.truncate(count);
    Ok(out)
}

/// Where to look for turning points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TurningSearch {
    /// Real turning points on a window.
    Window { x_min: f64, x_max: f64 },
    /// Real and complex turning points, following pairs from small `q`.
    Continuation,
}

fn with_branch(spec: FunctionSpec, roots: Vec<ZeroRecord>) -> Result<Vec<TurningPointRecord>> {
    let f = Func::new(spec, 0);
    roots
        .into_iter()
        .map(|root| {
            Ok(TurningPointRecord {
                branch_value: f.value(root.location)?,
                root,
            })
        })
        .collect()
}

/// Zeros of `f'` with branch values `f(tau)`, ordered by modulus.
pub fn find_turning_points(spec: FunctionSpec, search: &TurningSearch, count: usize) -> Result<Vec<TurningPointRecord>> {
    let func = Func::new(spec, 1);
    let roots = match *search {
        TurningSearch::Window { x_min, x_max } => find_real_roots(&func, x_min, x_max, count)?.zeros,
        TurningSearch::Continuation => {
            let snap = snapshot(&func)?;
            let mut all = finish_roots(&func, &snap.0, &snap.1)?;
            all.truncate(count);
            all
        }
    };
    with_branch(spec, roots)
}

type Roots = (Vec<(f64, f64)>, Vec<(Complex64, f64)>);

/// All roots of `func` in the default window at its own `q`.
fn snapshot(func: &Func) -> Result<Roots> {
    let spec = func.spec();
    check_continuable(spec)?;
    let window = default_window(spec);
    let q = spec.qp.q();
    if q <= CONTINUATION_START_Q {
        let real = scan::scan_real(func, window.0, window.1)?.roots;
        return Ok((real, Vec::new()));
    }
    let snap = continuation::track(func, window, CONTINUATION_START_Q, q)?;
    Ok((
        snap.real.iter().map(|r| (r.x, r.error)).collect(),
        snap.complex.iter().map(|c| (c.z, c.error)).collect(),
    ))
}

/// The `count` smallest zeros of `spec` (conjugates listed separately),
/// checked for completeness with the argument principle.
pub fn leading_zeros(spec: FunctionSpec, count: usize) -> Result<Vec<ZeroRecord>> {
    let func = Func::new(spec, 0);
    let (real, upper) = match (spec.family, spec.qp.convention()) {
        (Family::Exp, Convention::Jackson) if spec.qp.q() > 1.0 => {
            let q = spec.qp.q();
            // zeros sit at q^i/(1-q); scan a little past the last one needed
            let reach = q.powi(count as i32 + 2) / (q - 1.0);
            (scan::scan_real(&func, -reach, -1e-3)?.roots, Vec::new())
        }
        (Family::Exp | Family::ExpDerivative(_), Convention::Symmetric) => snapshot(&func)?,
        _ => {
            return Err(QError::MethodMismatch {
                method: "zeros".into(),
                family: format!("{} ({})", spec.family, spec.qp.convention()),
            })
        }
    };
    let all = finish_roots(&func, &real, &upper)?;
    if all.len() <= count {
        return Err(QError::InsufficientZeros(format!(
            "found {} zeros, need more than {count} to certify completeness",
            all.len()
        )));
    }
    let radius = 0.5 * (all[count - 1].location.norm() + all[count].location.norm());
    if all[count].location.norm() - all[count - 1].location.norm() > 1e-6 * radius {
        let inside = winding_circle(&func, radius)?;
        if inside != count as i64 {
            return Err(QError::Certification(format!(
                "argument principle counts {inside} zeros within |z| < {radius}, located {count}"
            )));
        }
    }
    let mut all = all;
    all.truncate(count);
    Ok(all)
}

/// Positive real zeros of a trigonometric member, smallest first, stopping
/// early once rounding in the series makes locations unreliable.
pub fn positive_real_zeros(spec: FunctionSpec, count: usize) -> Result<Vec<ZeroRecord>> {
    if !matches!(spec.family, Family::Cos | Family::Sin) {
        return Err(QError::InvalidArgument(format!(
            "positive real zeros are defined for cos and sin, not {}",
            spec.family
        )));
    }
    let func = Func::new(spec, 0);
    let mut reach = 8.0;
    let mut roots: Vec<(f64, f64)> = Vec::new();
    for _ in 0..60 {
        let found = scan::scan_real(&func, 1e-3, reach)?.roots;
        roots = found
            .into_iter()
            .take_while(|&(x, err)| err <= 1e-6 * x)
            .collect();
        let reliable_reach = func.rounding_limit(reach)?;
        if roots.len() >= count || !reliable_reach {
            break;
        }
        reach *= 2.0;
    }
    roots.truncate(count);
    let mut out = finish_roots(&func, &roots, &[])?;
    out.retain(|z| z.location.re > 0.0);
    Ok(out)
}

impl Func {
    /// Whether evaluation at `x` is still accurate enough to place roots.
    fn rounding_limit(&self, x: f64) -> Result<bool> {
        let v = self.eval(Complex64::new(x, 0.0), 0)?;
        let d = self.eval(Complex64::new(x, 0.0), 1)?;
        Ok(v.error_estimate() <= 1e-6 * x * d.value.norm().max(v.value.norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::QParam;

    fn sym(q: f64) -> FunctionSpec {
        FunctionSpec::exp(QParam::symmetric(q).unwrap())
    }

    #[test]
    fn jackson_zeros_are_geometric() {
        for q in [1.09, 1.5, 2.0] {
            let spec = FunctionSpec::exp(QParam::jackson(q).unwrap());
            let zeros = leading_zeros(spec, 8).unwrap();
            for (i, z) in zeros.iter().enumerate() {
                let exact = q.powi(i as i32 + 1) / (1.0 - q);
                assert!((z.location.re - exact).abs() <= 1e-10 * exact.abs(), "q={q} {z:?} vs {exact}");
                assert_eq!(z.kind, RootKind::RealAxis);
                assert!(z.certified);
            }
        }
    }

    #[test]
    fn jackson_window_scan() {
        let spec = FunctionSpec::exp(QParam::jackson(1.09).unwrap());
        let found = find_real_zeros(spec, -20.0, 0.0, 10).unwrap();
        let want = [-12.1111, -13.2011, -14.3892, -15.6842];
        for (z, w) in found.zeros.iter().zip(want) {
            assert!((z.location.re - w).abs() < 1e-3, "{z:?}");
        }
    }

    #[test]
    fn symmetric_035_real_zero() {
        let found = find_real_zeros(sym(0.35), -6.0, 0.0, 10).unwrap();
        assert_eq!(found.zeros.len(), 1);
        assert!((found.zeros[0].location.re + 5.19755).abs() < 1e-4);
    }

    #[test]
    fn symmetric_035_complex_pair() {
        let zeros = find_complex_zeros(sym(0.35), &SeedStrategy::Continuation, 2).unwrap();
        let up = zeros[0];
        assert_eq!(up.kind, RootKind::ConjugatePairUpper);
        assert!((up.location - Complex64::new(-2.8222, 1.969)).norm() < 1e-3, "{up:?}");
        assert_eq!(zeros[1].location, up.location.conj());
        assert!(up.certified);
        assert!(up.residual < 1e-10 * up.local_scale.max(1.0));
    }

    #[test]
    fn symmetric_035_turning_points() {
        let tps = find_turning_points(sym(0.35), &TurningSearch::Continuation, 4).unwrap();
        let a = tps[0];
        assert!((a.root.location - Complex64::new(-3.5434, 1.32945)).norm() < 1e-3, "{a:?}");
        assert!((a.branch_value - Complex64::new(0.0222415, 0.01879)).norm() < 1e-4);
        let real = find_turning_points(sym(0.35), &TurningSearch::Window { x_min: -12.0, x_max: 0.0 }, 4).unwrap();
        assert!((real[0].root.location.re + 6.3471).abs() < 1e-3);
        assert!((real[0].branch_value.re + 0.00909587).abs() < 1e-4);
        assert!((real[1].root.location.re + 10.7028).abs() < 1e-3);
        assert!((real[1].branch_value.re - 0.087536).abs() < 1e-4);
    }

    #[test]
    fn product_form_matches_series() {
        let spec = sym(0.5);
        let zeros = leading_zeros(spec, 20).unwrap();
        let z = Complex64::new(-1.0, 0.0);
        let product: Complex64 = zeros.iter().map(|r| 1.0 - z / r.location).product();
        let series = Series::new(spec).eval(z, WORKING_TOL).unwrap().value;
        assert!((product - series).norm() < 1e-3, "{product} vs {series}");
    }

    #[test]
    fn continuation_annotates_first_collision() {
        let t = continue_in_q(sym(0.1), 0, 0.10, 0.20, 20).unwrap();
        assert!(!t.truncated);
        let ev = t.events.iter().find(|e| e.into_complex).expect("collision event");
        assert!((ev.q_after - 0.14).abs() < 0.01, "{ev:?}");
        for pair in t.rows.chunks(1) {
            let _ = pair;
        }
        let early = continue_in_q(sym(0.1), 0, 0.10, 0.13, 6).unwrap();
        let first = early.rows.iter().filter(|r| r.id == early.rows[0].id);
        for row in first {
            assert_eq!(row.kind, RootKind::RealAxis);
            assert!(row.location.re < 0.0);
        }
    }

    #[test]
    fn trig_zeros_are_real_and_positive() {
        let qp = QParam::symmetric(0.5).unwrap();
        for family in [Family::Cos, Family::Sin] {
            let zeros = positive_real_zeros(FunctionSpec::new(family, qp), 6).unwrap();
            assert!(zeros.len() >= 4, "{family}: {}", zeros.len());
            assert!(zeros.windows(2).all(|w| w[0].location.re < w[1].location.re));
        }
    }
}
