//! Marching-squares extraction of the curves `Re f = 0` and `Im f = 0`.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QError, Result};
use crate::qnum::{FunctionSpec, Series, WORKING_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    fn validate(&self) -> Result<()> {
        let ok = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|v| v.is_finite())
            && self.re_min < self.re_max
            && self.im_min < self.im_max;
        if ok {
            Ok(())
        } else {
            Err(QError::InvalidArgument(format!("degenerate window {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContourField {
    ReZero,
    ImZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourSet {
    pub polylines: Vec<Vec<Complex64>>,
    /// `f` at every polyline vertex.
    pub w_images: Vec<Vec<Complex64>>,
    pub field: ContourField,
    pub spec: FunctionSpec,
    pub window: Window,
    pub grid_n: usize,
}

pub const MIN_GRID: usize = 16;

/// Grid edge: horizontal edges run from vertex `(i, j)` to `(i + 1, j)`,
/// vertical ones from `(i, j)` to `(i, j + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Edge {
    horizontal: bool,
    i: usize,
    j: usize,
}

/// Zero-level curves of the selected field of `f` on a `grid_n` x `grid_n`
/// cell grid. Points where the series cannot be evaluated are left out.
pub fn extract_contours(spec: FunctionSpec, window: Window, grid_n: usize, field: ContourField) -> Result<ContourSet> {
    window.validate()?;
    if grid_n < MIN_GRID {
        return Err(QError::InvalidArgument(format!(
            "grid_n must be at least {MIN_GRID}, got {grid_n}"
        )));
    }
    let series = Series::new(spec);
    let n = grid_n;
    let dx = (window.re_max - window.re_min) / n as f64;
    let dy = (window.im_max - window.im_min) / n as f64;
    let vertex = |i: usize, j: usize| Complex64::new(window.re_min + i as f64 * dx, window.im_min + j as f64 * dy);
    let pick = |w: Complex64| match field {
        ContourField::ReZero => w.re,
        ContourField::ImZero => w.im,
    };

    let mut values = vec![f64::NAN; (n + 1) * (n + 1)];
    for j in 0..=n {
        for i in 0..=n {
            match series.eval(vertex(i, j), WORKING_TOL) {
                Ok(v) => values[j * (n + 1) + i] = pick(v.value),
                Err(e) if e.is_domain() => {}
                Err(e) => return Err(e),
            }
        }
    }
    let value = |i: usize, j: usize| values[j * (n + 1) + i];

    let crossing = |e: Edge| -> Option<Complex64> {
        let (i1, j1) = if e.horizontal { (e.i + 1, e.j) } else { (e.i, e.j + 1) };
        let (s0, s1) = (value(e.i, e.j), value(i1, j1));
        if (s0 >= 0.0) == (s1 >= 0.0) {
            return None;
        }
        let t = s0 / (s0 - s1);
        Some(vertex(e.i, e.j) + (vertex(i1, j1) - vertex(e.i, e.j)) * t)
    };

    let mut segments: Vec<(Edge, Edge)> = Vec::new();
    let mut points: HashMap<Edge, Complex64> = HashMap::new();
    for j in 0..n {
        for i in 0..n {
            let corners = [value(i, j), value(i + 1, j), value(i + 1, j + 1), value(i, j + 1)];
            if corners.iter().any(|v| v.is_nan()) {
                continue;
            }
            // bottom, right, top, left
            let edges = [
                Edge { horizontal: true, i, j },
                Edge { horizontal: false, i: i + 1, j },
                Edge { horizontal: true, i, j: j + 1 },
                Edge { horizontal: false, i, j },
            ];
            let mut hit = Vec::with_capacity(4);
            for e in edges {
                if let Some(p) = crossing(e) {
                    points.insert(e, p);
                    hit.push(e);
                }
            }
            match hit.len() {
                2 => segments.push((hit[0], hit[1])),
                4 => {
                    let center = 0.25 * corners.iter().sum::<f64>();
                    let [bottom, right, top, left] = edges;
                    if (center >= 0.0) == (corners[0] >= 0.0) {
                        segments.push((bottom, right));
                        segments.push((top, left));
                    } else {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    }
                }
                _ => {}
            }
        }
    }

    let polylines = join(&segments, &points);
    let mut w_images = Vec::with_capacity(polylines.len());
    for line in &polylines {
        let mut images = Vec::with_capacity(line.len());
        for &z in line {
            images.push(series.eval(z, WORKING_TOL)?.value);
        }
        w_images.push(images);
    }
    Ok(ContourSet {
        polylines,
        w_images,
        field,
        spec,
        window,
        grid_n,
    })
}

fn lex(a: Complex64, b: Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Chain segments that share an edge into polylines.
fn join(segments: &[(Edge, Edge)], points: &HashMap<Edge, Complex64>) -> Vec<Vec<Complex64>> {
    let mut at: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        at.entry(*a).or_default().push(k);
        at.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let other = |k: usize, e: Edge| if segments[k].0 == e { segments[k].1 } else { segments[k].0 };
    let next = |e: Edge, used: &[bool]| at[&e].iter().copied().find(|&k| !used[k]);

    let mut lines = Vec::new();
    // open chains first start from edges touched once, then closed loops
    let mut starts: Vec<Edge> = at.iter().filter(|(_, v)| v.len() == 1).map(|(e, _)| *e).collect();
    starts.sort_by(|a, b| lex(points[a], points[b]));
    let loop_starts: Vec<Edge> = segments.iter().map(|s| s.0).collect();
    for start in starts.into_iter().chain(loop_starts) {
        let Some(first) = next(start, &used) else { continue };
        let mut edges = vec![start];
        let mut k = first;
        loop {
            used[k] = true;
            let e = other(k, *edges.last().unwrap());
            edges.push(e);
            match next(e, &used) {
                Some(k2) => k = k2,
                None => break,
            }
        }
        let mut line: Vec<Complex64> = edges.iter().map(|e| points[e]).collect();
        line.dedup();
        let closed = edges.first() == edges.last();
        if !closed && lex(line[0], *line.last().unwrap()).is_gt() {
            line.reverse();
        }
        if line.len() >= 2 {
            lines.push(line);
        }
    }
    lines.sort_by(|a, b| lex(a[0], b[0]));
    lines
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::{Family, QParam};
    use crate::zeroscape::positive_real_zeros;

    fn window(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Window {
        Window { re_min, re_max, im_min, im_max }
    }

    #[test]
    fn real_axis_is_an_imaginary_zero_contour() {
        let spec = FunctionSpec::exp(QParam::symmetric(0.5).unwrap());
        let set = extract_contours(spec, window(-4.0, 4.0, -2.0, 2.0), 32, ContourField::ImZero).unwrap();
        let on_axis = set.polylines.iter().any(|line| {
            line.iter().all(|z| z.im.abs() < 1e-12)
                && line.first().unwrap().re <= -3.99
                && line.last().unwrap().re >= 3.99
        });
        assert!(on_axis, "{:?}", set.polylines);
    }

    #[test]
    fn real_part_vanishes_at_first_cos_zero_on_imaginary_axis() {
        let qp = QParam::symmetric(0.5).unwrap();
        let c1 = positive_real_zeros(FunctionSpec::new(Family::Cos, qp), 1).unwrap()[0].location.re;
        let set = extract_contours(FunctionSpec::exp(qp), window(-1.0, 1.0, 0.0, 2.0 * c1), 20, ContourField::ReZero).unwrap();
        let cell = 2.0 * c1 / 20.0;
        let hit = set
            .polylines
            .iter()
            .flatten()
            .any(|z| z.re.abs() < 1e-9 && (z.im - c1).abs() < cell);
        assert!(hit);
    }

    #[test]
    fn vertices_lie_on_the_zero_set() {
        let spec = FunctionSpec::exp(QParam::symmetric(0.35).unwrap());
        let set = extract_contours(spec, window(-6.0, 0.0, -3.0, 3.0), 48, ContourField::ReZero).unwrap();
        assert!(!set.polylines.is_empty());
        for (line, images) in set.polylines.iter().zip(&set.w_images) {
            assert_eq!(line.len(), images.len());
            for w in images {
                assert!(w.re.abs() < 0.05, "{w}");
            }
        }
    }

    #[test]
    fn small_grid_is_rejected() {
        let spec = FunctionSpec::exp(QParam::symmetric(0.5).unwrap());
        assert!(extract_contours(spec, window(-1.0, 1.0, -1.0, 1.0), 8, ContourField::ImZero).is_err());
    }
}
