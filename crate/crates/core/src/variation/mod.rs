//! First and second variation of `s -> gamma(K_s)`, the cofactor
//! identities behind them, and residual checks for the divergence-free
//! property of the cofactor field.

mod cofactor;

pub use cofactor::{cofactor, cofactor_matrix, det_second_derivative, CofactorData, MAX_COFACTOR_SIZE};

use serde::Serialize;

use crate::bodies::{measure_of_body, Body, FamilyKind, PerturbationFamily};
use crate::error::{Error, Result};
use crate::linalg;
use crate::measures::{moments, MomentTriple, RadialMeasure};
use crate::oracles::fd::{finite_diff, FD_STEP_G};
use crate::sphere_core::{gradient_energy, integrate, node_jets, tangent_curvature, SphereGrid, SphericalFunction};

fn check_dim(f: &SphericalFunction, grid: &SphereGrid) -> Result<()> {
    if f.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: f.dim() });
    }
    Ok(())
}

/// Largest divergence component `|sum_i (c_ij(h))_i|` over nodes and
/// columns.
pub fn cheng_yau_residual(h: &SphericalFunction, grid: &SphereGrid) -> Result<f64> {
    check_dim(h, grid)?;
    if h.uses_finite_differences() {
        return Err(Error::BlackBoxUnsupported);
    }
    let n = grid.dim();
    let per_node: Vec<f64> = grid.map_nodes(|k, u| {
        let jet = h.extension_jet(u, 3);
        let frame = grid.frame(k);
        // A = D^2 H + u u^T has Q on the tangent space and 1 on u
        let mut a = jet.hess.clone();
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] += u[i] * u[j];
            }
        }
        let inv = match linalg::inverse(n, &a) {
            Some(inv) => inv,
            None => return f64::INFINITY,
        };
        let det = linalg::det(n, &a);
        let m = n - 1;
        // derivative of T = adj(A) - det(A) u u^T along each frame vector
        let mut dt: Vec<Vec<f64>> = Vec::with_capacity(m);
        for i in 0..m {
            let v = &frame[i * n..(i + 1) * n];
            let mut da = vec![0.0; n * n];
            for p in 0..n {
                for q in 0..n {
                    let third: f64 = (0..n).map(|r| jet.t(p, q, r) * v[r]).sum();
                    da[p * n + q] = third + v[p] * u[q] + u[p] * v[q];
                }
            }
            let ida = linalg::matmul(n, &inv, &da);
            let tr = linalg::trace(n, &ida);
            let idai = linalg::matmul(n, &ida, &inv);
            let mut d = vec![0.0; n * n];
            for p in 0..n {
                for q in 0..n {
                    let dadj = det * (tr * inv[p * n + q] - idai[p * n + q]);
                    let duu = det * tr * u[p] * u[q] + det * (v[p] * u[q] + u[p] * v[q]);
                    d[p * n + q] = dadj - duu;
                }
            }
            dt.push(d);
        }
        let mut worst = 0.0f64;
        for j in 0..m {
            let ej = &frame[j * n..(j + 1) * n];
            let mut div = 0.0;
            for (i, d) in dt.iter().enumerate() {
                let ei = &frame[i * n..(i + 1) * n];
                for p in 0..n {
                    for q in 0..n {
                        div += ei[p] * d[p * n + q] * ej[q];
                    }
                }
            }
            worst = worst.max(div.abs());
        }
        worst
    });
    Ok(per_node.into_iter().fold(0.0, f64::max))
}

fn tangent_matrices(f: &SphericalFunction, grid: &SphereGrid) -> Vec<Vec<f64>> {
    let jets = node_jets(f, grid, 2);
    grid.map_nodes(|k, _| tangent_curvature(&jets[k], grid.frame(k)))
}

fn trace_product(m: usize, a: &[f64], b: &[f64]) -> f64 {
    (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| a[i * m + j] * b[j * m + i]).sum()
}

/// Residuals of the two integration-by-parts identities: the symmetry of
/// `int phi c_ij(h) Q(psi)_ij` in `(psi, phi)`, and of
/// `int psi c_ij,kl(h) Q(psi)_ij Q(phi)_kl` under exchanging the outer
/// `psi` with `phi`.
pub fn ibp_residuals(
    h: &Body,
    psi: &SphericalFunction,
    phi: &SphericalFunction,
    grid: &SphereGrid,
) -> Result<(f64, f64)> {
    h.check_grid(grid)?;
    check_dim(psi, grid)?;
    check_dim(phi, grid)?;
    let m = grid.dim() - 1;
    let qpsi = tangent_matrices(psi, grid);
    let qphi = tangent_matrices(phi, grid);
    let terms: Vec<[f64; 4]> = grid.map_nodes(|k, u| {
        let q = h.curvature().matrix(k);
        let c = cofactor_matrix(m, q);
        let (a, b) = (psi.value(u), phi.value(u));
        [
            b * trace_product(m, &c, &qpsi[k]),
            a * trace_product(m, &c, &qphi[k]),
            a * det_second_derivative(m, q, &qpsi[k], &qphi[k]),
            b * det_second_derivative(m, q, &qpsi[k], &qpsi[k]),
        ]
    });
    let int = |i: usize| grid.integrate_values(&terms.iter().map(|t| t[i]).collect::<Vec<_>>());
    Ok(((int(0) - int(1)).abs(), (int(2) - int(3)).abs()))
}

/// `F(h, psi)`: derivative at `s = 0` of `gamma` along `h + s psi`.
pub fn first_variation(
    body: &Body,
    psi: &SphericalFunction,
    measure: &RadialMeasure,
    grid: &SphereGrid,
) -> Result<f64> {
    body.check_grid(grid)?;
    check_dim(psi, grid)?;
    let n = grid.dim();
    let m = n - 1;
    let pj = node_jets(psi, grid, 2);
    let vals: Vec<Result<f64>> = grid.map_nodes(|k, _| {
        let h = body.value(k);
        let q = body.curvature().matrix(k);
        let det = body.curvature().determinant(k);
        let d = body.radial_distance(k);
        let a = measure.moment_a(d, n)?;
        let p = &pj[k];
        let qpsi = tangent_curvature(p, grid.frame(k));
        let c = cofactor_matrix(m, q);
        let mut out = p.value * det * a + h * trace_product(m, &c, &qpsi) * a;
        if !measure.is_lebesgue() {
            let b = measure.moment_b(d, n)?;
            let dot: f64 = body.gradient(k).iter().zip(&p.grad).map(|(x, y)| x * y).sum();
            out += h * det * b * (h * p.value + dot) / d;
        }
        Ok(out)
    });
    let vals = vals.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(grid.integrate_values(&vals))
}

/// `g(s) = gamma(K_s)`.
pub fn g_eval(family: &PerturbationFamily, measure: &RadialMeasure, s: f64, grid: &SphereGrid) -> Result<f64> {
    measure_of_body(measure, &family.body_at(s, grid)?, grid)
}

/// `g'(s)` of an additive family from the three-term formula, evaluated by
/// re-basing the family at `s`.
pub fn g_prime_general(family: &PerturbationFamily, measure: &RadialMeasure, grid: &SphereGrid, s: f64) -> Result<f64> {
    if family.kind() != FamilyKind::Additive {
        return Err(Error::RequiresAdditive);
    }
    let body = family.body_at(s, grid)?;
    first_variation(&body, family.direction(), measure, grid)
}

/// Central finite difference of `g` at `s = 0`.
pub fn g_second_fd(family: &PerturbationFamily, measure: &RadialMeasure, grid: &SphereGrid, step: f64) -> Result<f64> {
    let mut err = None;
    let v = finite_diff(
        |s| match g_eval(family, measure, s, grid) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        2,
        step,
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// Closed forms at `h = R`.
#[derive(Clone, Debug, Serialize)]
pub struct VariationAtBall {
    pub radius: f64,
    pub dim: usize,
    pub measure: String,
    pub g0: f64,
    pub gprime: f64,
    /// `R^{n-2} f ((n-1) int psi^2 - int |grad psi|^2) + R^{n-1} f' int psi^2`
    pub gsecond: f64,
    /// Same quantity written with the moments `A, B, C`.
    pub gsecond_moments: f64,
    pub moments: MomentTriple,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct DirectionIntegrals {
    pub mean: f64,
    pub l2: f64,
    pub energy: f64,
}

pub(crate) fn direction_integrals(psi: &SphericalFunction, grid: &SphereGrid) -> Result<DirectionIntegrals> {
    Ok(DirectionIntegrals {
        mean: integrate(psi, grid)?,
        l2: integrate(&psi.mul(psi), grid)?,
        energy: gradient_energy(psi, grid)?,
    })
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    Ok(())
}

pub fn variation_at_ball(
    r: f64,
    psi: &SphericalFunction,
    measure: &RadialMeasure,
    grid: &SphereGrid,
) -> Result<VariationAtBall> {
    check_radius(r)?;
    check_dim(psi, grid)?;
    let n = grid.dim();
    let nf = n as f64;
    let mt = moments(measure, r, n)?;
    let di = direction_integrals(psi, grid)?;
    let (f, df) = (measure.f(r), measure.df(r));
    let rn2 = r.powi(n as i32 - 2);
    let gsecond = rn2 * f * ((nf - 1.0) * di.l2 - di.energy) + r.powi(n as i32 - 1) * df * di.l2;
    let gsecond_moments = rn2 * (mt.a * nf * (nf - 1.0) + 2.0 * nf * r * mt.b + r * r * mt.c) * di.l2
        - rn2 * (nf * mt.a + r * mt.b) * di.energy;
    Ok(VariationAtBall {
        radius: r,
        dim: n,
        measure: measure.label().to_string(),
        g0: grid.surface_area() * r.powi(n as i32) * mt.a,
        gprime: r.powi(n as i32 - 1) * f * di.mean,
        gsecond,
        gsecond_moments,
        moments: mt,
    })
}

/// `g'(0) = R^{n-1} f(R) int psi` for `h = R`.
pub fn g_prime_ball(r: f64, psi: &SphericalFunction, measure: &RadialMeasure, grid: &SphereGrid) -> Result<f64> {
    check_radius(r)?;
    Ok(r.powi(grid.dim() as i32 - 1) * measure.f(r) * integrate(psi, grid)?)
}

pub fn g_second_ball(r: f64, psi: &SphericalFunction, measure: &RadialMeasure, grid: &SphereGrid) -> Result<f64> {
    Ok(variation_at_ball(r, psi, measure, grid)?.gsecond)
}

/// `h = R` at every node, up to relative `1e-12`.
pub(crate) fn ball_radius(body: &Body) -> Option<f64> {
    let r = body.value(0);
    let tol = 1e-12 * r.abs().max(1.0);
    let flat = body.jets().iter().all(|j| (j.value - r).abs() <= tol && j.grad.iter().all(|g| g.abs() <= tol));
    flat.then_some(r)
}

/// Correction `A(h, psi)` with `g''_mult(0) = g''_add(0) + A(h, psi)`
/// for `psi = h log phi`. Closed form `R^{n-2} f(R) int psi^2` at a ball;
/// otherwise a central difference in `s` of `F(h, (h + s psi) psi / h)`.
pub fn log_correction(h: &Body, psi: &SphericalFunction, measure: &RadialMeasure, grid: &SphereGrid) -> Result<f64> {
    h.check_grid(grid)?;
    check_dim(psi, grid)?;
    if let Some(r) = ball_radius(h) {
        return Ok(r.powi(grid.dim() as i32 - 2) * measure.f(r) * integrate(&psi.mul(psi), grid)?);
    }
    let ratio = psi.mul(&h.support().powf(-1.0));
    let eval = |s: f64| -> Result<f64> {
        let dir = psi.add(&ratio.mul(psi).scale(s));
        first_variation(h, &dir, measure, grid)
    };
    let step = FD_STEP_G;
    Ok((eval(step)? - eval(-step)?) / (2.0 * step))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{body_from_support, make_family};
    use crate::sphere_core::build_grid;
    use std::f64::consts::PI;

    fn ball(n: usize, r: f64, grid: &SphereGrid) -> Body {
        body_from_support(&SphericalFunction::constant(n, r), grid).unwrap()
    }

    #[test]
    fn cheng_yau_examples() {
        let g2 = build_grid(2, 32).unwrap();
        let h = SphericalFunction::cos_k(2).scale(0.1).offset(1.0);
        assert!(cheng_yau_residual(&h, &g2).unwrap() < 1e-13);
        let g = build_grid(3, 24).unwrap();
        assert!(cheng_yau_residual(&SphericalFunction::constant(3, 2.0), &g).unwrap() < 1e-14);
        let u3 = SphericalFunction::coordinate(3, 2);
        let h = u3.mul(&u3).scale(0.1).offset(1.0);
        assert!(cheng_yau_residual(&h, &g).unwrap() < 1e-12);
        let bb = SphericalFunction::from_fn(3, |u: &[f64]| 1.0 + 0.1 * u[2] * u[2], None);
        assert_eq!(cheng_yau_residual(&bb, &g), Err(Error::BlackBoxUnsupported));
    }

    #[test]
    fn cheng_yau_on_a_curved_body() {
        let g = build_grid(3, 16).unwrap();
        let u1 = SphericalFunction::coordinate(3, 0);
        let h = u1.mul(&u1).mul(&u1).mul(&u1).scale(0.2).offset(1.0);
        let q = crate::sphere_core::curvature_matrix(&h, &g).unwrap();
        let spread = (0..q.len()).map(|k| q.determinant(k)).fold(0.0f64, |a, d| a.max((d - 1.0).abs()));
        assert!(spread > 0.1);
        assert!(cheng_yau_residual(&h, &g).unwrap() < 1e-12);
    }

    #[test]
    fn ibp_examples() {
        let g = build_grid(2, 64).unwrap();
        let unit = ball(2, 1.0, &g);
        let c2 = SphericalFunction::cos_k(2);
        let (r1, r2) = ibp_residuals(&unit, &c2, &c2, &g).unwrap();
        assert!(r1 == 0.0 && r2 == 0.0);
        let (r1, _) = ibp_residuals(&unit, &c2, &SphericalFunction::constant(2, 1.0), &g).unwrap();
        assert!(r1 < 1e-10);
        let g3 = build_grid(3, 24).unwrap();
        let sq = |i| SphericalFunction::coordinate(3, i).mul(&SphericalFunction::coordinate(3, i));
        let h = body_from_support(&sq(0).scale(0.05).offset(1.0), &g3).unwrap();
        let (r1, r2) = ibp_residuals(&h, &sq(1), &sq(2), &g3).unwrap();
        assert!(r1 < 1e-8 && r2 < 1e-8, "{r1} {r2}");
    }

    #[test]
    fn ball_closed_forms() {
        let g = build_grid(2, 64).unwrap();
        let one = SphericalFunction::constant(2, 1.0);
        let leb = RadialMeasure::lebesgue();
        let gauss = RadialMeasure::gaussian();
        assert!((g_prime_ball(1.0, &one, &leb, &g).unwrap() - 2.0 * PI).abs() < 1e-13);
        assert!(g_prime_ball(1.0, &SphericalFunction::cos_k(1), &leb, &g).unwrap().abs() < 1e-14);
        let e = (-0.5f64).exp();
        assert!((g_prime_ball(1.0, &one, &gauss, &g).unwrap() - 2.0 * PI * e).abs() < 1e-13);
        assert!((g_second_ball(1.0, &one, &leb, &g).unwrap() - 2.0 * PI).abs() < 1e-13);
        assert!(g_second_ball(1.0, &SphericalFunction::cos_k(1), &leb, &g).unwrap().abs() < 1e-13);
        let v = variation_at_ball(1.0, &SphericalFunction::cos_k(1), &gauss, &g).unwrap();
        assert!((v.gsecond + PI * e).abs() < 1e-13);
        assert!((v.gsecond - v.gsecond_moments).abs() < 1e-10);
        assert!((v.g0 - 2.0 * PI * (1.0 - e)).abs() < 1e-13);
    }

    #[test]
    fn general_first_variation_matches_ball_and_fd() {
        let g = build_grid(2, 64).unwrap();
        let gauss = RadialMeasure::gaussian();
        let psi = SphericalFunction::cos_k(2).scale(0.3).offset(1.0);
        let unit = ball(2, 1.0, &g);
        let general = first_variation(&unit, &psi, &gauss, &g).unwrap();
        assert!((general - g_prime_ball(1.0, &psi, &gauss, &g).unwrap()).abs() < 1e-12);
        let base = body_from_support(&SphericalFunction::cos_k(2).scale(0.1).offset(1.0), &g).unwrap();
        let fam = make_family(FamilyKind::Additive, &base, &SphericalFunction::cos_k(2), &g).unwrap();
        let exact = g_prime_general(&fam, &gauss, &g, 0.0).unwrap();
        let fd = finite_diff(|s| g_eval(&fam, &gauss, s, &g).unwrap(), 0.0, 1, 1e-3).unwrap();
        assert!((exact - fd).abs() < 1e-5 * exact.abs().max(1.0), "{exact} {fd}");
        assert!(g_prime_general(&fam, &gauss, &g, 0.0).is_ok());
        let zero = make_family(FamilyKind::Additive, &base, &SphericalFunction::constant(2, 0.0), &g).unwrap();
        assert_eq!(g_prime_general(&zero, &gauss, &g, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn g_eval_examples() {
        let g = build_grid(2, 64).unwrap();
        let unit = ball(2, 1.0, &g);
        let fam = make_family(FamilyKind::Additive, &unit, &SphericalFunction::constant(2, 1.0), &g).unwrap();
        let leb = RadialMeasure::lebesgue();
        assert!((g_eval(&fam, &leb, 0.5, &g).unwrap() - 2.25 * PI).abs() < 1e-12);
        let want = 2.0 * PI * (1.0 - (-1.44f64 / 2.0).exp());
        assert!((g_eval(&fam, &RadialMeasure::gaussian(), 0.2, &g).unwrap() - want).abs() < 1e-12);
        assert!(g_eval(&fam, &leb, 0.6, &g).is_err());
    }

    #[test]
    fn log_correction_examples() {
        let g = build_grid(2, 64).unwrap();
        let unit = ball(2, 1.0, &g);
        let gauss = RadialMeasure::gaussian();
        let zero = SphericalFunction::constant(2, 0.0);
        assert_eq!(log_correction(&unit, &zero, &gauss, &g).unwrap(), 0.0);
        let one = SphericalFunction::constant(2, 1.0);
        let want = 2.0 * PI * (-0.5f64).exp();
        assert!((log_correction(&unit, &one, &gauss, &g).unwrap() - want).abs() < 1e-12);
        // the finite-difference path agrees with the closed form on a ball
        // that is not recognized as one
        let g3 = build_grid(3, 16).unwrap();
        let r = 1.5;
        let b = ball(3, r, &g3);
        let psi = SphericalFunction::coordinate(3, 0).scale(0.3).offset(1.0);
        let closed = log_correction(&b, &psi, &gauss, &g3).unwrap();
        let ratio = psi.mul(&SphericalFunction::constant(3, 1.0 / r));
        let linear = first_variation(&b, &ratio.mul(&psi), &gauss, &g3).unwrap();
        assert!((closed - linear).abs() < 1e-12 * closed.abs(), "{closed} {linear}");
    }
}
