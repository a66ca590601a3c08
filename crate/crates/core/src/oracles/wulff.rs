//! Planar Wulff shapes `{x : <x, u_k> <= h_k}` as exact half-plane
//! intersections.

use std::collections::VecDeque;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::compensated_sum;

pub const MIN_DIRECTIONS: usize = 720;
const SCALE: f64 = (1u64 << 40) as f64;

/// Convex polygon, counterclockwise.
#[derive(Clone, Debug, Serialize)]
pub struct PlanarBody {
    pub vertices: Vec<[f64; 2]>,
    /// Hausdorff distance bound to the body whose support function was
    /// sampled, valid when the samples come from a support function.
    pub tolerance: f64,
}

impl PlanarBody {
    /// Shoelace area.
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        let m = v.len();
        0.5 * compensated_sum((0..m).map(|i| {
            let (a, b) = (v[i], v[(i + 1) % m]);
            a[0] * b[1] - a[1] * b[0]
        }))
    }
}

#[derive(Clone, Copy)]
struct Line {
    a: i128,
    b: i128,
    c: i128,
}

fn det(l1: Line, l2: Line) -> i128 {
    l1.a * l2.b - l2.a * l1.b
}

/// Is the intersection point of `l1` and `l2` on or outside `l3`?
fn violates(l1: Line, l2: Line, l3: Line) -> Result<bool> {
    let d = det(l1, l2);
    if d == 0 {
        return Err(Error::InvalidParameter("parallel constraints met in the half-plane sweep".into()));
    }
    let xn = l1.c * l2.b - l2.c * l1.b;
    let yn = l1.a * l2.c - l2.a * l1.c;
    let s = l3.a * xn + l3.b * yn - l3.c * d;
    Ok(if d > 0 { s >= 0 } else { s <= 0 })
}

fn vertex(l1: Line, l2: Line) -> [f64; 2] {
    let d = det(l1, l2) as f64;
    [(l1.c * l2.b - l2.c * l1.b) as f64 / d, (l1.a * l2.c - l2.a * l1.c) as f64 / d]
}

/// Wulff shape of `h` sampled at the angles `2 pi k / N`.
pub fn wulff_polygon(h: &[f64]) -> Result<PlanarBody> {
    let count = h.len();
    if count < MIN_DIRECTIONS {
        return Err(Error::InvalidParameter(format!("need at least {MIN_DIRECTIONS} directions, got {count}")));
    }
    if let Some((k, &v)) = h.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::NonPositiveSupport { node: k, value: v });
    }
    let hmax = h.iter().copied().fold(0.0, f64::max);
    let lines: Vec<Line> = h
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let t = 2.0 * PI * k as f64 / count as f64;
            Line {
                a: (t.cos() * SCALE).round() as i128,
                b: (t.sin() * SCALE).round() as i128,
                c: (v / hmax * SCALE).round() as i128,
            }
        })
        .collect();
    let mut dq: VecDeque<Line> = VecDeque::new();
    for &l in &lines {
        while dq.len() >= 2 && violates(dq[dq.len() - 2], dq[dq.len() - 1], l)? {
            dq.pop_back();
        }
        while dq.len() >= 2 && violates(dq[0], dq[1], l)? {
            dq.pop_front();
        }
        dq.push_back(l);
    }
    loop {
        let m = dq.len();
        if m >= 3 && violates(dq[m - 2], dq[m - 1], dq[0])? {
            dq.pop_back();
        } else if m >= 3 && violates(dq[0], dq[1], dq[m - 1])? {
            dq.pop_front();
        } else {
            break;
        }
    }
    if dq.len() < 3 {
        return Err(Error::InvalidParameter("empty half-plane intersection".into()));
    }
    let m = dq.len();
    let vertices = (0..m)
        .map(|i| {
            let p = vertex(dq[i], dq[(i + 1) % m]);
            [p[0] * hmax, p[1] * hmax]
        })
        .collect();
    Ok(PlanarBody { vertices, tolerance: hmax * (1.0 / (PI / count as f64).cos() - 1.0) })
}

/// Sample `h(theta)` at `directions` equispaced angles and intersect.
pub fn wulff_polygon_from_fn<F: Fn(f64) -> f64>(h: F, directions: usize) -> Result<PlanarBody> {
    let vals: Vec<f64> = (0..directions).map(|k| h(2.0 * PI * k as f64 / directions as f64)).collect();
    wulff_polygon(&vals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_polygon_area() {
        for n in [720usize, 2880] {
            let p = wulff_polygon(&vec![1.0; n]).unwrap();
            let want = n as f64 * (PI / n as f64).tan();
            assert!((p.area() - want).abs() < 1e-11, "{}", p.area() - want);
            assert_eq!(p.vertices.len(), n);
        }
    }

    #[test]
    fn shifted_disk_keeps_its_area() {
        let p = wulff_polygon_from_fn(|t| 1.0 + 0.3 * t.cos(), 2880).unwrap();
        assert!((p.area() - PI).abs() < 1e-5);
    }

    #[test]
    fn geometric_mean_of_opposite_shifts_loses_area() {
        let p = wulff_polygon_from_fn(|t| (1.0 - 0.09 * t.cos().powi(2)).sqrt(), 2880).unwrap();
        assert!(p.area() < PI - 0.01);
    }

    #[test]
    fn redundant_constraints_are_dropped() {
        // a square given by four tight directions plus slack ones
        let tight = |t: f64| {
            let q = t / (PI / 2.0);
            (q - q.round()).abs() < 1e-9
        };
        let p = wulff_polygon_from_fn(|t| if tight(t) { 1.0 } else { 10.0 }, 720).unwrap();
        assert_eq!(p.vertices.len(), 4);
        assert!((p.area() - 4.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(wulff_polygon(&[1.0; 10]).is_err());
        let mut h = vec![1.0; 720];
        h[5] = 0.0;
        assert!(matches!(wulff_polygon(&h), Err(Error::NonPositiveSupport { node: 5, .. })));
    }
}
