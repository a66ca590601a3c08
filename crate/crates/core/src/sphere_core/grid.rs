use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::{compensated_sum, gauss_sine_power, sphere_area};

/// Quadrature nodes and weights on `S^{n-1}`.
///
/// * `n = 2`: `resolution` equispaced angles (periodic trapezoid rule).
/// * `n >= 3`: product rule in hyperspherical coordinates. Each polar angle
///   uses `ceil(resolution / 2)` Gauss nodes for its `sin^k` weight (Gauss-
///   Legendre in the polar cosine for `n = 3`); the azimuth is uniform with
///   twice that many points.
///
/// Every rule integrates restrictions of polynomials of degree
/// `exactness_degree()` exactly.
#[derive(Clone, Debug)]
pub struct SphereGrid {
    dim: usize,
    resolution: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    frames: Vec<f64>,
    exactness: usize,
}

pub const MIN_RESOLUTION: usize = 4;
pub const MAX_RESOLUTION: usize = 4096;

impl SphereGrid {
    pub fn new(dim: usize, resolution: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidGrid(format!("dimension must be at least 2, got {dim}")));
        }
        if resolution < MIN_RESOLUTION {
            return Err(Error::InvalidGrid(format!(
                "resolution {resolution} is below the minimum {MIN_RESOLUTION} needed for degree-2 exactness"
            )));
        }
        if resolution > MAX_RESOLUTION {
            return Err(Error::InvalidGrid(format!("resolution {resolution} exceeds {MAX_RESOLUTION}")));
        }
        let (nodes, weights, exactness) =
            if dim == 2 { circle_rule(resolution) } else { product_rule(dim, resolution) };
        let count = weights.len();
        let mut frames = Vec::with_capacity(count * dim * (dim - 1));
        for k in 0..count {
            frames.extend(householder_frame(&nodes[k * dim..(k + 1) * dim]));
        }
        Ok(Self { dim, resolution, nodes, weights, frames, exactness })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn exactness_degree(&self) -> usize {
        self.exactness
    }

    pub fn node(&self, k: usize) -> &[f64] {
        &self.nodes[k * self.dim..(k + 1) * self.dim]
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.weights[k]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Orthonormal tangent frame at node `k`: `n - 1` vectors of length `n`,
    /// stored row after row.
    pub fn frame(&self, k: usize) -> &[f64] {
        let s = self.dim * (self.dim - 1);
        &self.frames[k * s..(k + 1) * s]
    }

    pub fn surface_area(&self) -> f64 {
        sphere_area(self.dim)
    }

    /// `sum_k w_k v_k` with compensated summation.
    pub fn integrate_values(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        compensated_sum(self.weights.iter().zip(values).map(|(w, v)| w * v))
    }

    /// Evaluate `f` at every node (node-parallel, results in node order).
    pub fn map_nodes<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, &[f64]) -> T + Sync + Send,
    {
        (0..self.len()).into_par_iter().map(|k| f(k, self.node(k))).collect()
    }
}

fn circle_rule(count: usize) -> (Vec<f64>, Vec<f64>, usize) {
    let mut nodes = Vec::with_capacity(2 * count);
    for k in 0..count {
        let t = 2.0 * PI * k as f64 / count as f64;
        nodes.push(t.cos());
        nodes.push(t.sin());
    }
    (nodes, vec![2.0 * PI / count as f64; count], count - 1)
}

fn product_rule(dim: usize, resolution: usize) -> (Vec<f64>, Vec<f64>, usize) {
    let m = resolution.div_ceil(2);
    let az = 2 * m;
    // polar angle j (0-based) carries weight sin^{dim - 2 - j}
    let polar: Vec<(Vec<f64>, Vec<f64>)> = (0..dim - 2).map(|j| gauss_sine_power(m, (dim - 2 - j) as u32)).collect();
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut idx = vec![0usize; dim - 2];
    loop {
        let mut point = vec![0.0; dim];
        let mut sin_prod = 1.0;
        let mut w = 1.0;
        for (j, &i) in idx.iter().enumerate() {
            let t = polar[j].0[i];
            point[j] = sin_prod * t;
            sin_prod *= (1.0 - t * t).max(0.0).sqrt();
            w *= polar[j].1[i];
        }
        for a in 0..az {
            let phi = 2.0 * PI * a as f64 / az as f64;
            let mut p = point.clone();
            p[dim - 2] = sin_prod * phi.cos();
            p[dim - 1] = sin_prod * phi.sin();
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            nodes.extend(p.iter().map(|x| x / norm));
            weights.push(w * 2.0 * PI / az as f64);
        }
        // odometer over the polar indices
        let mut j = 0;
        loop {
            if j == dim - 2 {
                return (nodes, weights, 2 * m - 1);
            }
            idx[j] += 1;
            if idx[j] < m {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Orthonormal basis of `u^perp` from the Householder reflection that maps
/// the dominant coordinate axis onto `u`.
pub(crate) fn householder_frame(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let k = (0..n).max_by(|&a, &b| u[a].abs().partial_cmp(&u[b].abs()).unwrap()).unwrap();
    let sign = if u[k] >= 0.0 { 1.0 } else { -1.0 };
    let mut v = u.to_vec();
    v[k] += sign;
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let mut out = Vec::with_capacity(n * (n - 1));
    for j in (0..n).filter(|&j| j != k) {
        // column j of I - 2 v v^T / (v.v)
        for i in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            out.push(delta - 2.0 * v[i] * v[j] / vv);
        }
    }
    out
}
