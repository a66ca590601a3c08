//! Verifiers for the Brunn-Minkowski type inequalities. Every check returns
//! a [`VerificationReport`] whose margin is nonnegative when the inequality
//! holds.

mod report;
mod suite;

pub use report::{min_margin, CheckId, OracleCheck, ReportParams, VerificationReport, DEFAULT_TOLERANCE};
pub use suite::{direction_suite, first_harmonic, random_even_polynomial, second_harmonic, SUITE_SEED};

use std::f64::consts::PI;

use crate::bodies::{
    ball_intrinsic_volume, body_from_support, boundary_inverse_height, log_combine, make_family, make_family_capped,
    measure_of_body, minkowski_combine, quermassintegrals, Body, FamilyKind, PerturbationFamily, DEFAULT_MAX_RADIUS,
};
use crate::error::{Error, Result};
use crate::linalg;
use crate::measures::{moments, RadialMeasure};
use crate::oracles::{finite_diff, wulff_polygon_from_fn, FD_STEP_G};
use crate::sphere_core::{integrate, poincare_ratio, split_mean, SphereGrid, SphericalFunction};
use crate::variation::{
    ball_radius, direction_integrals, first_variation, g_eval, g_second_fd, log_correction, variation_at_ball,
};

/// Odd part below this is treated as zero.
pub const PARITY_TOL: f64 = 1e-10;
/// Directions used by the planar polygon oracle.
pub const POLYGON_DIRECTIONS: usize = 2880;
pub const EPSILON_POINTS: usize = 5;

/// `max_u |psi(u) - psi(-u)| / 2` over the grid nodes.
pub fn odd_component(psi: &SphericalFunction, grid: &SphereGrid) -> f64 {
    grid.map_nodes(|_, u| {
        let neg: Vec<f64> = u.iter().map(|x| -x).collect();
        (psi.value(u) - psi.value(&neg)).abs() / 2.0
    })
    .into_iter()
    .fold(0.0, f64::max)
}

fn even_component(psi: &SphericalFunction, grid: &SphereGrid) -> f64 {
    grid.map_nodes(|_, u| {
        let neg: Vec<f64> = u.iter().map(|x| -x).collect();
        (psi.value(u) + psi.value(&neg)).abs() / 2.0
    })
    .into_iter()
    .fold(0.0, f64::max)
}

/// "even", "odd" or "neither", measured on the grid.
pub fn parity_label(psi: &SphericalFunction, grid: &SphereGrid) -> &'static str {
    if odd_component(psi, grid) <= PARITY_TOL {
        "even"
    } else if even_component(psi, grid) <= PARITY_TOL {
        "odd"
    } else {
        "neither"
    }
}

fn params(grid: &SphereGrid, radius: f64, measure: &str, direction: &SphericalFunction) -> ReportParams {
    ReportParams {
        n: grid.dim(),
        resolution: grid.resolution(),
        radius,
        measure: measure.to_string(),
        direction: direction.to_string(),
        parity: parity_label(direction, grid).to_string(),
        ..Default::default()
    }
}

fn ball(n: usize, r: f64, grid: &SphereGrid) -> Result<Body> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    body_from_support(&SphericalFunction::constant(n, r), grid)
}

fn check_dim(f: &SphericalFunction, grid: &SphereGrid) -> Result<()> {
    if f.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: f.dim() });
    }
    Ok(())
}

/// Radius of the base body when it is a ball, else the mean of `h`.
fn nominal_radius(body: &Body, grid: &SphereGrid) -> f64 {
    ball_radius(body).unwrap_or_else(|| grid.integrate_values(&body.values()) / grid.surface_area())
}

/// `((n-1)/n) g'(0)^2 - g''(0) g(0)` along an additive family.
pub fn check_dim_bm_infinitesimal(
    family: &PerturbationFamily,
    measure: &RadialMeasure,
    grid: &SphereGrid,
) -> Result<VerificationReport> {
    if family.kind() != FamilyKind::Additive {
        return Err(Error::RequiresAdditive);
    }
    let base = family.base();
    let psi = family.direction();
    let nf = grid.dim() as f64;
    let g0 = measure_of_body(measure, base, grid)?;
    let g1 = first_variation(base, psi, measure, grid)?;
    let fd2 = g_second_fd(family, measure, grid, FD_STEP_G)?;
    let radius = ball_radius(base);
    let (g2, oracle) = match radius {
        Some(r) => (variation_at_ball(r, psi, measure, grid)?.gsecond, ("finite_difference_g2", fd2)),
        None => {
            let fd1 = finite_diff(|s| g_eval(family, measure, s, grid).unwrap_or(f64::NAN), 0.0, 1, FD_STEP_G)?;
            (fd2, ("finite_difference_g1", fd1))
        }
    };
    let lhs = g2 * g0;
    let rhs = (nf - 1.0) / nf * g1 * g1;
    let reference = if radius.is_some() { g2 } else { g1 };
    let mut rep = VerificationReport::new(
        CheckId::DimBmInfinitesimal,
        params(grid, nominal_radius(base, grid), measure.label(), psi),
        lhs,
        rhs,
        rhs - lhs,
    )
    .with_oracle(oracle.0, oracle.1, reference)
    .detail("g0", g0)
    .detail("g1", g1)
    .detail("g2", g2);
    if radius.is_none() {
        rep = rep.note("g''(0) from central differences with step 1e-3");
    }
    Ok(rep)
}

/// `-(g''(0) g(0) - g'(0)^2) / g(0)^2` along a multiplicative family, with
/// `g''` reduced to the additive direction `h log phi` plus the correction.
pub fn check_log_bm_infinitesimal(
    family: &PerturbationFamily,
    measure: &RadialMeasure,
    grid: &SphereGrid,
) -> Result<VerificationReport> {
    if family.kind() != FamilyKind::Multiplicative {
        return Err(Error::InvalidParameter("log-BM check needs a multiplicative family".into()));
    }
    let base = family.base();
    let psi = family.additive_direction();
    let g0 = measure_of_body(measure, base, grid)?;
    let g1 = first_variation(base, &psi, measure, grid)?;
    let radius = ball_radius(base);
    let g2_add = match radius {
        Some(r) => variation_at_ball(r, &psi, measure, grid)?.gsecond,
        None => {
            let add = make_family_capped(FamilyKind::Additive, base, &psi, grid, 4.0 * FD_STEP_G)?;
            g_second_fd(&add, measure, grid, FD_STEP_G)?
        }
    };
    let corr = log_correction(base, &psi, measure, grid)?;
    let g2 = g2_add + corr;
    let fd = g_second_fd(family, measure, grid, FD_STEP_G)?;
    let lhs = g2 * g0;
    let rhs = g1 * g1;
    let odd = odd_component(family.direction(), grid);
    let mut rep = VerificationReport::new(
        CheckId::LogBmInfinitesimal,
        params(grid, nominal_radius(base, grid), measure.label(), family.direction()),
        lhs,
        rhs,
        (rhs - lhs) / (g0 * g0),
    )
    .with_oracle("finite_difference_multiplicative_g2", fd, g2)
    .detail("g0", g0)
    .detail("g1", g1)
    .detail("g2_additive", g2_add)
    .detail("log_correction", corr)
    .detail("g2", g2)
    .detail("odd_component", odd);
    if odd > PARITY_TOL {
        rep = rep.note("phi is not even: outside the hypotheses of the log-BM statement");
    }
    if radius.is_none() {
        rep = rep.note("additive g''(0) from central differences with step 1e-3");
    }
    Ok(rep)
}

struct BallQuadratic {
    a: f64,
    f: f64,
    df: f64,
    area: f64,
}

impl BallQuadratic {
    fn new(r: f64, measure: &RadialMeasure, grid: &SphereGrid) -> Result<Self> {
        let a = moments(measure, r, grid.dim())?.a;
        Ok(Self { a, f: measure.f(r), df: measure.df(r), area: grid.surface_area() })
    }
}

/// `B2(psi) - B1(psi)` at the ball of radius `r`, with
/// `B1 = (A f/|S|)((n-1) int psi^2 - int |grad psi|^2) + (A R f'/|S|) int psi^2`
/// and `B2 = ((n-1)/n) f^2 (mean psi)^2`.
pub fn check_b1_b2(
    r: f64,
    psi: &SphericalFunction,
    measure: &RadialMeasure,
    grid: &SphereGrid,
) -> Result<VerificationReport> {
    check_dim(psi, grid)?;
    let n = grid.dim();
    let nf = n as f64;
    let base = ball(n, r, grid)?;
    let bq = BallQuadratic::new(r, measure, grid)?;
    let b1 = |psi: &SphericalFunction| -> Result<f64> {
        let di = direction_integrals(psi, grid)?;
        Ok(bq.a * bq.f / bq.area * ((nf - 1.0) * di.l2 - di.energy) + bq.a * r * bq.df / bq.area * di.l2)
    };
    let b2 = |psi: &SphericalFunction| -> Result<f64> {
        let mean = integrate(psi, grid)? / bq.area;
        Ok((nf - 1.0) / nf * bq.f * bq.f * mean * mean)
    };
    let (lhs, rhs) = (b1(psi)?, b2(psi)?);
    let (c, psi1) = split_mean(psi, grid)?;
    let constant = SphericalFunction::constant(n, c);
    let b1_zero_mean = b1(&psi1)?;
    let ball_margin = b2(&constant)? - b1(&constant)?;

    let family = make_family(FamilyKind::Additive, &base, psi, grid)?;
    let g0 = measure_of_body(measure, &base, grid)?;
    let g1 = first_variation(&base, psi, measure, grid)?;
    let g2 = g_second_fd(&family, measure, grid, FD_STEP_G)?;
    let scale = bq.area * bq.area * r.powi(2 * n as i32 - 2);
    let fd_margin = ((nf - 1.0) / nf * g1 * g1 - g2 * g0) / scale;

    let margin = rhs - lhs;
    let mut rep = VerificationReport::new(CheckId::B1B2, params(grid, r, measure.label(), psi), lhs, rhs, margin)
        .with_oracle("finite_difference_additive_family", fd_margin, margin)
        .detail("b1_zero_mean_part", b1_zero_mean)
        .detail("ball_case_margin", ball_margin)
        .detail("mean", c);
    if let Ok(ratio) = poincare_ratio(&psi1, grid) {
        rep = rep.detail("poincare_ratio_zero_mean_part", ratio);
    }
    if b1_zero_mean > DEFAULT_TOLERANCE {
        rep = rep.note("decomposition path: B1 of the zero-mean part is positive");
    }
    if ball_margin < -DEFAULT_TOLERANCE {
        rep = rep.note("decomposition path: ball case fails");
    }
    Ok(rep)
}

/// Log-BM second variation at the ball:
/// `f^2 (mean psi)^2 - [A (n f + R f') mean psi^2 - A f mean |grad psi|^2]`.
pub fn check_logbm_ball_form(
    r: f64,
    psi: &SphericalFunction,
    measure: &RadialMeasure,
    grid: &SphereGrid,
) -> Result<VerificationReport> {
    check_dim(psi, grid)?;
    let n = grid.dim();
    let nf = n as f64;
    let base = ball(n, r, grid)?;
    let bq = BallQuadratic::new(r, measure, grid)?;
    let di = direction_integrals(psi, grid)?;
    let mean = di.mean / bq.area;
    let lhs = bq.a * (nf * bq.f + r * bq.df) * di.l2 / bq.area - bq.a * bq.f * di.energy / bq.area;
    let rhs = bq.f * bq.f * mean * mean;
    let margin = rhs - lhs;

    let phi = psi.scale(1.0 / r).exp();
    let family = make_family_capped(FamilyKind::Multiplicative, &base, &phi, grid, 4.0 * FD_STEP_G)?;
    let g0 = measure_of_body(measure, &base, grid)?;
    let g1 = first_variation(&base, psi, measure, grid)?;
    let g2 = g_second_fd(&family, measure, grid, FD_STEP_G)?;
    let scale = bq.area * bq.area * r.powi(2 * n as i32 - 2);
    let fd_margin = -(g2 * g0 - g1 * g1) / scale;

    let odd = odd_component(psi, grid);
    let slope = nf * bq.f + r * bq.df;
    let ratio_ok = slope <= 0.0 || bq.f / slope >= 1.0 / nf;
    let mut rep =
        VerificationReport::new(CheckId::LogbmBallForm, params(grid, r, measure.label(), psi), lhs, rhs, margin)
            .with_oracle("finite_difference_multiplicative_family", fd_margin, margin)
            .detail("odd_component", odd)
            .detail("density_ratio_condition", if ratio_ok { 1.0 } else { 0.0 });
    let (_, psi1) = split_mean(psi, grid)?;
    match poincare_ratio(&psi1, grid) {
        Ok(p) => {
            let chain = p >= 2.0 * nf - 1e-8 && ratio_ok;
            rep = rep.detail("poincare_ratio_zero_mean_part", p).detail("case1_chain", if chain { 1.0 } else { 0.0 });
        }
        Err(_) => rep = rep.detail("case1_chain", if ratio_ok { 1.0 } else { 0.0 }),
    }
    if odd > PARITY_TOL {
        let explained = margin < -rep.tolerance;
        rep = rep.note(format!("psi has an odd component of size {odd:e}")).expecting_failure(explained);
    }
    Ok(rep)
}

fn epsilon_grid(eps_max: f64) -> Vec<f64> {
    (1..=EPSILON_POINTS).map(|k| k as f64 * eps_max / EPSILON_POINTS as f64).collect()
}

fn lambda_grid(steps: usize) -> Vec<f64> {
    (0..=steps).map(|k| k as f64 / steps as f64).collect()
}

fn scan_family(
    kind: FamilyKind,
    r: f64,
    direction: &SphericalFunction,
    eps_max: f64,
    lambda_steps: usize,
    grid: &SphereGrid,
) -> Result<PerturbationFamily> {
    check_dim(direction, grid)?;
    if !(eps_max > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon_max must be positive, got {eps_max}")));
    }
    if lambda_steps == 0 {
        return Err(Error::InvalidParameter("lambda_steps must be at least 1".into()));
    }
    let base = ball(grid.dim(), r, grid)?;
    let family = make_family_capped(kind, &base, direction, grid, DEFAULT_MAX_RADIUS.max(eps_max))?;
    if eps_max > family.validity_radius() {
        return Err(Error::EpsilonExceedsValidity { epsilon: eps_max, a: family.validity_radius() });
    }
    Ok(family)
}

struct ScanSetup<'a> {
    check: CheckId,
    measure: &'a RadialMeasure,
    family: PerturbationFamily,
    eps: Vec<f64>,
    lambdas: Vec<f64>,
}

fn run_scan(setup: ScanSetup<'_>, grid: &SphereGrid) -> Result<Vec<VerificationReport>> {
    let ScanSetup { check, measure, family, eps, lambdas } = setup;
    let n = grid.dim() as f64;
    let bodies = eps.iter().map(|&e| family.body_at(e, grid)).collect::<Result<Vec<_>>>()?;
    let gammas = bodies.iter().map(|b| measure_of_body(measure, b, grid)).collect::<Result<Vec<_>>>()?;
    let base_params = params(grid, family.base().value(0), measure.label(), family.direction());
    let mut out = Vec::with_capacity(eps.len() * eps.len() * lambdas.len());
    for i in 0..eps.len() {
        for j in 0..eps.len() {
            for &l in &lambdas {
                let combined = match check {
                    CheckId::ScanDimBm => minkowski_combine(&bodies[i], &bodies[j], l, grid)?,
                    _ => log_combine(&bodies[i], &bodies[j], l, grid)?,
                };
                let gc = measure_of_body(measure, &combined, grid)?;
                let (lhs, rhs) = match check {
                    CheckId::ScanDimBm => {
                        (gc.powf(1.0 / n), l * gammas[i].powf(1.0 / n) + (1.0 - l) * gammas[j].powf(1.0 / n))
                    }
                    _ => (gc.ln(), l * gammas[i].ln() + (1.0 - l) * gammas[j].ln()),
                };
                let p = ReportParams { eps1: Some(eps[i]), eps2: Some(eps[j]), lambda: Some(l), ..base_params.clone() };
                let mut rep = VerificationReport::new(check, p, lhs, rhs, lhs - rhs)
                    .detail("gamma_combined", gc)
                    .detail("gamma_1", gammas[i])
                    .detail("gamma_2", gammas[j]);
                if (l - 0.5).abs() < 1e-15 {
                    let direct =
                        measure_of_body(measure, &family.body_at(l * eps[i] + (1.0 - l) * eps[j], grid)?, grid)?;
                    rep = rep.with_oracle("family_member", direct, gc);
                }
                out.push(rep);
            }
        }
    }
    Ok(out)
}

/// `gamma(l K1 + (1-l) K2)^(1/n) - l gamma(K1)^(1/n) - (1-l) gamma(K2)^(1/n)`
/// for `h_i = R + eps_i psi`, over `eps_i = k eps_max / 5` and
/// `l = 0, 1/lambda_steps, ..., 1`.
pub fn scan_dim_bm(
    measure: &RadialMeasure,
    r: f64,
    psi: &SphericalFunction,
    eps_max: f64,
    lambda_steps: usize,
    grid: &SphereGrid,
) -> Result<Vec<VerificationReport>> {
    let family = scan_family(FamilyKind::Additive, r, psi, eps_max, lambda_steps, grid)?;
    let setup = ScanSetup {
        check: CheckId::ScanDimBm,
        measure,
        family,
        eps: epsilon_grid(eps_max),
        lambdas: lambda_grid(lambda_steps),
    };
    run_scan(setup, grid)
}

/// `log gamma(K1^l K2^(1-l)) - l log gamma(K1) - (1-l) log gamma(K2)` for
/// `h_i = R phi^eps_i` with `phi` even and positive.
pub fn scan_log_bm(
    measure: &RadialMeasure,
    r: f64,
    phi: &SphericalFunction,
    eps_max: f64,
    lambda_steps: usize,
    grid: &SphereGrid,
) -> Result<Vec<VerificationReport>> {
    check_dim(phi, grid)?;
    let odd = odd_component(phi, grid);
    if odd > PARITY_TOL {
        return Err(Error::OddDirection(odd));
    }
    let family = scan_family(FamilyKind::Multiplicative, r, phi, eps_max, lambda_steps, grid)?;
    let setup = ScanSetup {
        check: CheckId::ScanLogBm,
        measure,
        family,
        eps: epsilon_grid(eps_max),
        lambdas: lambda_grid(lambda_steps),
    };
    run_scan(setup, grid)
}

/// Area of the Wulff shape of `h^l R^(1-l)` for `h = R + t cos(theta)`
/// (a disk shifted by `t`) against `pi R^2`. For `t > 0` the inequality is
/// expected to fail.
pub fn shift_counterexample(r: f64, t: f64, lambda: f64, grid: &SphereGrid) -> Result<VerificationReport> {
    if grid.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: grid.dim() });
    }
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    if !(0.0..r).contains(&t) {
        return Err(Error::InvalidParameter(format!("shift t must satisfy 0 <= t < R, got t = {t}, R = {r}")));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    let polygon =
        wulff_polygon_from_fn(|th| (r + t * th.cos()).powf(lambda) * r.powf(1.0 - lambda), POLYGON_DIRECTIONS)?;
    let area = polygon.area();
    let rhs = PI * r * r;
    let shifted = SphericalFunction::cos_k(1).scale(t).offset(r);
    let disk = ball(2, r, grid)?;
    let lebesgue = RadialMeasure::lebesgue();
    let direction = SphericalFunction::cos_k(1).scale(t);
    let mut p = params(grid, r, lebesgue.label(), &direction);
    p.t = Some(t);
    p.lambda = Some(lambda);
    let mut rep = VerificationReport::new(CheckId::ShiftCounterexample, p, area, rhs, area - rhs)
        .detail("polygon_hausdorff_bound", polygon.tolerance)
        .detail("polygon_vertices", polygon.vertices.len() as f64);
    let quad = body_from_support(&shifted, grid)
        .and_then(|k| log_combine(&k, &disk, lambda, grid))
        .and_then(|m| measure_of_body(&lebesgue, &m, grid));
    match quad {
        Ok(q) => rep = rep.with_oracle("quadrature", q, area),
        Err(e) => rep = rep.note(format!("geometric mean is not a support function on the grid: {e}")),
    }
    if lambda == 0.5 {
        let x = t / r;
        let closed = r * r * (PI - PI / 4.0 * (1.0 - (1.0 - x * x).sqrt()));
        rep = rep.detail("closed_form_area", closed);
    }
    Ok(rep.expecting_failure(t > 0.0 && lambda > 0.0 && lambda < 1.0))
}

struct ConeTerms {
    log_lhs: f64,
    bm_lhs: f64,
    rhs: f64,
    mean: f64,
    second: f64,
    weight_sum: f64,
}

fn cone_terms(body: &Body, psi: &SphericalFunction, grid: &SphereGrid) -> Result<ConeTerms> {
    let n = grid.dim();
    let m = n - 1;
    let volume = measure_of_body(&RadialMeasure::lebesgue(), body, grid)?;
    let per_node: Vec<Result<[f64; 6]>> = grid.map_nodes(|k, u| {
        let h = body.value(k);
        let q = body.curvature().matrix(k);
        let w = h * body.curvature().determinant(k) / (n as f64 * volume);
        let qinv = linalg::inverse(m, q).ok_or(Error::NotConvex { node: k, eigenvalue: 0.0 })?;
        let tr = linalg::trace(m, &qinv);
        let p = psi.value(u);
        let grad = psi.spherical_gradient(u);
        let frame = grid.frame(k);
        let g: Vec<f64> = (0..m).map(|a| (0..n).map(|i| frame[a * n + i] * grad[i]).sum()).collect();
        let quad: f64 = (0..m).map(|a| (0..m).map(|b| qinv[a * m + b] * g[a] * g[b]).sum::<f64>()).sum();
        Ok([w, w * p / h, w * p * p / (h * h), w * p * p * (1.0 + tr * h) / (h * h), w * p * p * tr / h, w * quad / h])
    });
    let rows = per_node.into_iter().collect::<Result<Vec<_>>>()?;
    let int = |i: usize| grid.integrate_values(&rows.iter().map(|r| r[i]).collect::<Vec<_>>());
    let mean = int(1);
    let nf = n as f64;
    Ok(ConeTerms {
        log_lhs: int(3) - nf * mean * mean,
        bm_lhs: int(4) - (nf - 1.0) * mean * mean,
        rhs: int(5),
        mean,
        second: int(2),
        weight_sum: int(0),
    })
}

/// Infinitesimal log-BM inequality against the normalized cone measure
/// `dV = h det Q / (n |K|) du`:
/// `int psi^2 (1 + h tr Q^-1) / h^2 dV - n (int psi / h dV)^2 <= int <Q^-1 grad psi, grad psi> / h dV`.
pub fn check_cone_measure_form(body: &Body, psi: &SphericalFunction, grid: &SphereGrid) -> Result<VerificationReport> {
    body.check_grid(grid)?;
    check_dim(psi, grid)?;
    let t = cone_terms(body, psi, grid)?;
    let odd = odd_component(psi, grid);
    let margin = t.rhs - t.log_lhs;
    let mut rep = VerificationReport::new(
        CheckId::ConeMeasureForm,
        params(grid, nominal_radius(body, grid), "lebesgue", psi),
        t.log_lhs,
        t.rhs,
        margin,
    )
    .detail("cone_weight_sum", t.weight_sum)
    .detail("bm_inf_margin", t.rhs - t.bm_lhs)
    .detail("cauchy_schwarz_gap", t.second - t.mean * t.mean)
    .detail("odd_component", odd);
    if (t.weight_sum - 1.0).abs() > 1e-10 {
        rep = rep.note("cone measure weights do not sum to 1");
    }
    if !body.is_symmetric() {
        rep = rep.note("body is not origin-symmetric");
    }
    if odd > PARITY_TOL {
        let explained = margin < -rep.tolerance;
        rep = rep.note(format!("psi has an odd component of size {odd:e}")).expecting_failure(explained);
    }
    Ok(rep)
}

/// `4 V_{n-1}^2 - V_n (2 pi V_{n-2} + int_{bd K} 1/<y, nu>)`, with constants
/// chosen so that balls are equality cases. The literal form
/// `V_{n-1}^2 - V_n (V_{n-2} + int 1/<y, nu>)` is kept in the details.
pub fn check_strengthened_minkowski(body: &Body, grid: &SphereGrid) -> Result<VerificationReport> {
    body.check_grid(grid)?;
    let n = grid.dim();
    let v = quermassintegrals(body, grid)?;
    let inv = boundary_inverse_height(body, grid)?;
    let (vn, vn1, vn2) = (v[n], v[n - 1], v[n - 2]);
    let lhs = vn * (2.0 * PI * vn2 + inv);
    let rhs = 4.0 * vn1 * vn1;
    let margin = rhs - lhs;
    let one = SphericalFunction::constant(n, 1.0);
    let cone = cone_terms(body, &one, grid)?;
    let via_cone = (cone.rhs - cone.log_lhs) * n as f64 * vn * vn;
    let ball_ratio =
        ball_intrinsic_volume(n, n - 1).powi(2) / (ball_intrinsic_volume(n, n) * ball_intrinsic_volume(n, n - 2));
    let mut rep = VerificationReport::new(
        CheckId::StrengthenedMinkowski,
        params(grid, nominal_radius(body, grid), "lebesgue", body.support()),
        lhs,
        rhs,
        margin,
    )
    .with_oracle("cone_measure_form_constant_direction", via_cone, margin)
    .detail("literal_form_margin", vn1 * vn1 - vn * (vn2 + inv))
    .detail("minkowski_second_margin", vn1 * vn1 / (vn * vn2) - ball_ratio)
    .detail("boundary_inverse_height", inv)
    .detail("v_n", vn)
    .detail("v_n_minus_1", vn1)
    .detail("v_n_minus_2", vn2);
    if !body.is_symmetric() && n == 2 {
        rep = rep.note("body is not origin-symmetric");
    }
    if n >= 3 {
        rep = rep.note("n >= 3: the inequality is stated for unconditional bodies");
    }
    Ok(rep)
}
