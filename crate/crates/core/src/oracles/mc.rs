//! Monte Carlo estimate of `gamma(K)` from uniform points in a bounding
//! cube, with membership decided by the support function.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::measures::RadialMeasure;
use crate::sphere_core::{householder_frame, tangent_curvature, SphereGrid, SphericalFunction};

/// Samples per random stream. Batch `b` uses stream `b` of the seed.
pub const MC_BATCH: usize = 1 << 16;
pub const MIN_SAMPLES: usize = 10_000;
const NEWTON_ITERS: usize = 50;
const NEWTON_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

struct Membership<'a> {
    h: &'a SphericalFunction,
    n: usize,
    inner: f64,
    outer: f64,
}

fn normalize(v: &mut [f64]) {
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= r);
}

impl Membership<'_> {
    /// Sign of `max_u <x, u> - h(u)`, found by Newton's method on the
    /// sphere from the radial direction of `x`.
    fn contains(&self, x: &[f64], r: f64) -> bool {
        if r <= self.inner {
            return true;
        }
        if r >= self.outer {
            return false;
        }
        let n = self.n;
        let m = n - 1;
        let mut u: Vec<f64> = x.iter().map(|v| v / r).collect();
        for _ in 0..NEWTON_ITERS {
            let jet = self.h.jet(&u, 2);
            let xu: f64 = x.iter().zip(&u).map(|(a, b)| a * b).sum();
            let gap = xu - jet.value;
            if gap > 0.0 {
                return false;
            }
            let frame = householder_frame(&u);
            let grad: Vec<f64> = (0..m)
                .map(|a| {
                    let e = &frame[a * n..(a + 1) * n];
                    (0..n).map(|i| e[i] * (x[i] - jet.grad[i])).sum()
                })
                .collect();
            let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if gnorm < NEWTON_TOL {
                return true;
            }
            // Riemannian Hessian of <x,u> - h(u) is -(Q + gap I)
            let mut hess = tangent_curvature(&jet, &frame);
            for a in 0..m {
                hess[a * m + a] += gap;
            }
            let ev = crate::linalg::sym_eigenvalues(m, &hess);
            let step: Vec<f64> = if ev[0] > 1e-8 {
                let inv = crate::linalg::inverse(m, &hess).expect("positive definite");
                (0..m).map(|a| (0..m).map(|b| inv[a * m + b] * grad[b]).sum()).collect()
            } else {
                let scale = 1.0 / (ev[m - 1].abs() + gap.abs() + 1.0);
                grad.iter().map(|g| g * scale).collect()
            };
            for a in 0..m {
                for i in 0..n {
                    u[i] += step[a] * frame[a * n + i];
                }
            }
            normalize(&mut u);
        }
        let xu: f64 = x.iter().zip(&u).map(|(a, b)| a * b).sum();
        xu <= self.h.value(&u)
    }
}

pub fn mc_measure(
    measure: &RadialMeasure,
    body: &Body,
    grid: &SphereGrid,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    body.check_grid(grid)?;
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!("Monte Carlo needs at least {MIN_SAMPLES} samples")));
    }
    let n = grid.dim();
    let values = body.values();
    let hmax = values.iter().copied().fold(0.0, f64::max);
    let hmin = values.iter().copied().fold(f64::INFINITY, f64::min);
    let slope = (0..grid.len())
        .map(|k| body.gradient(k).iter().map(|g| g * g).sum::<f64>().sqrt() / body.value(k))
        .fold(0.0, f64::max);
    let half = 1.05 * hmax * (1.0 + slope * slope).sqrt();
    let farthest = (0..grid.len()).map(|k| body.radial_distance(k)).fold(0.0, f64::max);
    let test = Membership { h: body.support(), n, inner: 0.98 * hmin, outer: 1.02 * farthest.min(half) };
    let batches = samples.div_ceil(MC_BATCH);
    let partial: Vec<(f64, f64)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = MC_BATCH.min(samples - b * MC_BATCH);
            let mut x = vec![0.0; n];
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                for xi in x.iter_mut() {
                    *xi = half * (2.0 * rng.random::<f64>() - 1.0);
                }
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                if test.contains(&x, r) {
                    let f = measure.f(r);
                    s1 += f;
                    s2 += f * f;
                }
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = partial.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let count = samples as f64;
    let mean = s1 / count;
    let var = ((s2 / count - mean * mean) * count / (count - 1.0)).max(0.0);
    let volume = (2.0 * half).powi(n as i32);
    Ok(McEstimate { value: volume * mean, std_error: volume * (var / count).sqrt(), samples, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::body_from_support;
    use crate::sphere_core::build_grid;
    use std::f64::consts::PI;

    #[test]
    fn disk_examples_and_determinism() {
        let g = build_grid(2, 64).unwrap();
        let disk = body_from_support(&SphericalFunction::constant(2, 1.0), &g).unwrap();
        let e = mc_measure(&RadialMeasure::lebesgue(), &disk, &g, 200_000, 7).unwrap();
        assert!((e.value - PI).abs() < 4.0 * e.std_error, "{e:?}");
        let again = mc_measure(&RadialMeasure::lebesgue(), &disk, &g, 200_000, 7).unwrap();
        assert_eq!(e, again);
        let e = mc_measure(&RadialMeasure::gaussian(), &disk, &g, 200_000, 3).unwrap();
        assert!((e.value - 2.0 * PI * (1.0 - (-0.5f64).exp())).abs() < 4.0 * e.std_error);
        assert!(mc_measure(&RadialMeasure::lebesgue(), &disk, &g, 10, 1).is_err());
    }

    #[test]
    fn membership_of_an_ellipse() {
        let g = build_grid(2, 64).unwrap();
        let h = SphericalFunction::cos_k(2).scale(0.1).offset(1.0);
        let body = body_from_support(&h, &g).unwrap();
        let test = Membership { h: body.support(), n: 2, inner: 0.0, outer: f64::INFINITY };
        // the boundary point with normal e1 is grad H(e1) = (1.1, 0)
        assert!(test.contains(&[1.099, 0.0], 1.099));
        assert!(!test.contains(&[1.101, 0.0], 1.101));
        assert!(test.contains(&[0.0, 0.899], 0.899));
        assert!(!test.contains(&[0.0, 0.901], 0.901));
    }
}
