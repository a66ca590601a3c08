use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{ConfigError, RunConfig};
use crate::bodies::{body_from_support, make_family, measure_of_body, FamilyKind};
use crate::error::Error;
use crate::inequalities::{self, direction_suite, second_harmonic, CheckId, VerificationReport};
use crate::measures::{make_measure, moment_identities, MeasureSpec, RadialMeasure};
use crate::oracles::{finite_diff, mc_measure, McEstimate, FD_STEP_G};
use crate::sphere_core::{build_grid, SphericalFunction};
use crate::variation::{cheng_yau_residual, cofactor, ibp_residuals, variation_at_ball};

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Compute(Error),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Compute(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

/// Monte Carlo cross-check of `gamma` on the body `R + epsilon_max psi`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McCheck {
    pub quadrature: f64,
    pub estimate: McEstimate,
    pub sigmas: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunResult {
    pub reports: Vec<VerificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<McCheck>,
}

impl RunResult {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass) && self.monte_carlo.as_ref().is_none_or(|m| m.pass)
    }
}

pub const MC_SIGMAS: f64 = 4.0;

fn run_check(check: CheckId, cfg: &RunConfig, measure: &RadialMeasure) -> Result<Vec<VerificationReport>, CliError> {
    let grid = build_grid(cfg.n, cfg.resolution)?;
    let (psi, phi) = cfg.directions()?;
    let r = cfg.radius;
    let body = || body_from_support(&cfg.body_support().expect("validated"), &grid);
    let reports = match check {
        CheckId::DimBmInfinitesimal => {
            let fam = make_family(FamilyKind::Additive, &body()?, &psi, &grid)?;
            vec![inequalities::check_dim_bm_infinitesimal(&fam, measure, &grid)?]
        }
        CheckId::LogBmInfinitesimal => {
            let fam = make_family(FamilyKind::Multiplicative, &body()?, &phi, &grid)?;
            vec![inequalities::check_log_bm_infinitesimal(&fam, measure, &grid)?]
        }
        CheckId::B1B2 => vec![inequalities::check_b1_b2(r, &psi, measure, &grid)?],
        CheckId::LogbmBallForm => vec![inequalities::check_logbm_ball_form(r, &psi, measure, &grid)?],
        CheckId::ScanDimBm => inequalities::scan_dim_bm(measure, r, &psi, cfg.epsilon_max, cfg.lambda_steps, &grid)?,
        CheckId::ScanLogBm => inequalities::scan_log_bm(measure, r, &phi, cfg.epsilon_max, cfg.lambda_steps, &grid)?,
        CheckId::ShiftCounterexample => vec![inequalities::shift_counterexample(r, cfg.t, cfg.lambda, &grid)?],
        CheckId::ConeMeasureForm => vec![inequalities::check_cone_measure_form(&body()?, &psi, &grid)?],
        CheckId::StrengthenedMinkowski => vec![inequalities::check_strengthened_minkowski(&body()?, &grid)?],
    };
    Ok(reports
        .into_iter()
        .map(|mut rep| {
            rep.params.seed = Some(cfg.seed);
            rep.with_tolerance(cfg.tolerances.margin)
        })
        .collect())
}

/// Run every configured check, in configuration order.
pub fn run_config(cfg: &RunConfig) -> Result<RunResult, CliError> {
    let measure = make_measure(&cfg.measure)?;
    let mut reports = Vec::new();
    for &check in &cfg.checks {
        reports.extend(run_check(check, cfg, &measure)?);
    }
    let monte_carlo = match &cfg.monte_carlo {
        Some(spec) => {
            let grid = build_grid(cfg.n, cfg.resolution)?;
            let (psi, _) = cfg.directions()?;
            let base = body_from_support(&SphericalFunction::constant(cfg.n, cfg.radius), &grid)?;
            let fam = make_family(FamilyKind::Additive, &base, &psi, &grid)?;
            let body = fam.body_at(cfg.epsilon_max.min(fam.validity_radius()), &grid)?;
            let quadrature = measure_of_body(&measure, &body, &grid)?;
            let estimate = mc_measure(&measure, &body, &grid, spec.samples, cfg.seed)?;
            let sigmas = (estimate.value - quadrature).abs() / estimate.std_error;
            Some(McCheck { quadrature, estimate, sigmas, pass: sigmas <= MC_SIGMAS })
        }
        None => None,
    };
    Ok(RunResult { reports, monte_carlo })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityRow {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub ok: bool,
}

impl IdentityRow {
    fn new(name: String, residual: f64, tolerance: f64) -> Self {
        Self { name, residual, tolerance, ok: residual <= tolerance }
    }
}

pub const IDENTITY_TOL: f64 = 1e-8;
pub const COFACTOR_TOL: f64 = 1e-12;
pub const DERIVATIVE_TOL: f64 = 1e-5;
pub const GSECOND_FORMS_TOL: f64 = 1e-10;
const COFACTOR_SAMPLES: usize = 200;

fn default_measures() -> Vec<MeasureSpec> {
    vec![
        MeasureSpec::Gaussian,
        MeasureSpec::ExpPower { p: 1.0 },
        MeasureSpec::ExpPower { p: 3.0 },
        MeasureSpec::Lebesgue,
    ]
}

/// Structural identities: moment identities, cofactor homogeneity,
/// divergence-free cofactor field, integration by parts, and the ball
/// variation formulas against finite differences.
pub fn verify_identities(
    n: usize,
    resolution: usize,
    measure: Option<&MeasureSpec>,
) -> Result<Vec<IdentityRow>, CliError> {
    let grid = build_grid(n, resolution)?;
    let specs = match measure {
        Some(m) => vec![m.clone()],
        None => default_measures(),
    };
    let measures = specs.iter().map(make_measure).collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for m in &measures {
        let worst = [0.5, 1.0, 2.0]
            .iter()
            .try_fold(0.0f64, |acc, &r| moment_identities(m, r, n).map(|(a, b)| acc.max(a.abs()).max(b.abs())))?;
        rows.push(IdentityRow::new(format!("moment identities [{}]", m.label()), worst, IDENTITY_TOL));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut h1, mut h2) = (0.0f64, 0.0f64);
    for i in 0..COFACTOR_SAMPLES {
        let size = 2 + i % 5;
        let mut a = vec![0.0; size * size];
        for r in 0..size {
            for c in r..size {
                let v = rng.random_range(-1.0..1.0);
                a[r * size + c] = v;
                a[c * size + r] = v;
            }
        }
        let data = cofactor(&a, size)?;
        h1 = h1.max(data.homog1_residual() / data.scale());
        h2 = h2.max(data.homog2_residual() / data.scale());
    }
    rows.push(IdentityRow::new("cofactor first-order homogeneity".into(), h1, COFACTOR_TOL));
    rows.push(IdentityRow::new("cofactor second-order homogeneity".into(), h2, COFACTOR_TOL));

    let h = second_harmonic(n).scale(0.1).offset(1.0);
    rows.push(IdentityRow::new("cofactor divergence".into(), cheng_yau_residual(&h, &grid)?, IDENTITY_TOL));
    let body = body_from_support(&h, &grid)?;
    let suite = direction_suite(n);
    let (r1, r2) = ibp_residuals(&body, &suite[2].1, &suite[3].1, &grid)?;
    rows.push(IdentityRow::new("integration by parts, first".into(), r1, IDENTITY_TOL));
    rows.push(IdentityRow::new("integration by parts, second".into(), r2, IDENTITY_TOL));

    let base = body_from_support(&SphericalFunction::constant(n, 1.0), &grid)?;
    for m in &measures {
        let (mut d1, mut d2, mut forms) = (0.0f64, 0.0f64, 0.0f64);
        for (_, psi) in &suite {
            let v = variation_at_ball(1.0, psi, m, &grid)?;
            let fam = make_family(FamilyKind::Additive, &base, psi, &grid)?;
            let g = |s: f64| {
                measure_of_body(m, &fam.body_at(s, &grid).expect("inside validity"), &grid).unwrap_or(f64::NAN)
            };
            let fd1 = finite_diff(g, 0.0, 1, FD_STEP_G)?;
            let fd2 = finite_diff(g, 0.0, 2, FD_STEP_G)?;
            d1 = d1.max((v.gprime - fd1).abs() / v.gprime.abs().max(v.g0));
            d2 = d2.max((v.gsecond - fd2).abs() / v.gsecond.abs().max(v.g0));
            forms = forms.max((v.gsecond - v.gsecond_moments).abs());
        }
        rows.push(IdentityRow::new(format!("g'(0) vs finite differences [{}]", m.label()), d1, DERIVATIVE_TOL));
        rows.push(IdentityRow::new(format!("g''(0) vs finite differences [{}]", m.label()), d2, DERIVATIVE_TOL));
        rows.push(IdentityRow::new(format!("g''(0) two forms [{}]", m.label()), forms, GSECOND_FORMS_TOL));
    }
    Ok(rows)
}
