//! Rotation-invariant log-concave measures with density `f(|x|)`, and the
//! radial moment integrals that appear in the variation formulas.
//!
//! Densities are unnormalized: both inequality families checked by this
//! crate are invariant under scaling the measure.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;

/// Absolute tolerance for the radial moment integrals.
pub const MOMENT_TOL: f64 = 1e-12;

pub type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `poly(r) * exp(-neg_log(r))` with both polynomials given by coefficient
/// lists in increasing degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyExpTerm {
    #[serde(default = "unit_poly")]
    pub poly: Vec<f64>,
    #[serde(default)]
    pub neg_log: Vec<f64>,
}

fn unit_poly() -> Vec<f64> {
    vec![1.0]
}

fn horner(c: &[f64], r: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &x| acc * r + x)
}

impl PolyExpTerm {
    pub fn eval(&self, r: f64) -> f64 {
        horner(&self.poly, r) * (-horner(&self.neg_log, r)).exp()
    }
}

fn eval_terms(terms: &[PolyExpTerm], r: f64) -> f64 {
    terms.iter().map(|t| t.eval(r)).sum()
}

/// Serializable description of a radial density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureSpec {
    /// `f(r) = exp(-r^2 / 2)`
    Gaussian,
    /// `f(r) = exp(-r^p)`, `p >= 1`
    ExpPower { p: f64 },
    /// `f = 1`
    Lebesgue,
    /// User density with analytic first and second derivatives, each a sum
    /// of [`PolyExpTerm`]s.
    Custom { f: Vec<PolyExpTerm>, df: Vec<PolyExpTerm>, d2f: Vec<PolyExpTerm> },
}

#[derive(Clone)]
enum Density {
    Gaussian,
    ExpPower(f64),
    Lebesgue,
    Custom { f: RadialFn, df: RadialFn, d2f: RadialFn },
}

/// A validated rotation-invariant log-concave density.
#[derive(Clone)]
pub struct RadialMeasure {
    density: Density,
    spec: Option<MeasureSpec>,
    label: String,
}

impl fmt::Debug for RadialMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadialMeasure({})", self.label)
    }
}

/// Moments `A = int t^{n-1} f(tD)`, `B = int t^n f'(tD)`,
/// `C = int t^{n+1} f''(tD)` over `t in [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentTriple {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub radius: f64,
    pub dim: usize,
}

fn exp_power_d2(p: f64, r: f64) -> f64 {
    let f = (-r.powf(p)).exp();
    let tail = if r == 0.0 {
        if p == 1.0 || p > 2.0 {
            0.0
        } else if p == 2.0 {
            2.0
        } else {
            f64::INFINITY
        }
    } else {
        p * (p - 1.0) * r.powf(p - 2.0)
    };
    let lead = if r == 0.0 && p < 1.0 { f64::INFINITY } else { p * p * r.powf(2.0 * p - 2.0) };
    (lead - tail) * f
}

/// Sample radii for validation: 0 and a log-spaced grid of `[1e-6, 100]`.
fn validation_radii() -> Vec<f64> {
    let count = 400;
    let mut r = vec![0.0];
    let (lo, hi) = (1e-6f64.ln(), 100f64.ln());
    for k in 0..count {
        r.push((lo + (hi - lo) * k as f64 / (count - 1) as f64).exp());
    }
    r
}

pub fn make_measure(spec: &MeasureSpec) -> Result<RadialMeasure> {
    let m = match spec {
        MeasureSpec::Gaussian => {
            RadialMeasure { density: Density::Gaussian, spec: Some(spec.clone()), label: "gaussian".into() }
        }
        MeasureSpec::Lebesgue => {
            RadialMeasure { density: Density::Lebesgue, spec: Some(spec.clone()), label: "lebesgue".into() }
        }
        MeasureSpec::ExpPower { p } => {
            if !(p.is_finite() && *p >= 1.0) {
                return Err(Error::InvalidMeasure { reason: format!("exp_power needs p >= 1, got {p}"), radius: 0.0 });
            }
            RadialMeasure { density: Density::ExpPower(*p), spec: Some(spec.clone()), label: format!("exp_power({p})") }
        }
        MeasureSpec::Custom { f, df, d2f } => {
            let (f, df, d2f) = (f.clone(), df.clone(), d2f.clone());
            RadialMeasure {
                density: Density::Custom {
                    f: Arc::new(move |r| eval_terms(&f, r)),
                    df: Arc::new(move |r| eval_terms(&df, r)),
                    d2f: Arc::new(move |r| eval_terms(&d2f, r)),
                },
                spec: Some(spec.clone()),
                label: "custom".into(),
            }
        }
    };
    m.validate()?;
    Ok(m)
}

impl RadialMeasure {
    pub fn gaussian() -> Self {
        make_measure(&MeasureSpec::Gaussian).expect("gaussian is valid")
    }

    pub fn lebesgue() -> Self {
        make_measure(&MeasureSpec::Lebesgue).expect("lebesgue is valid")
    }

    pub fn exp_power(p: f64) -> Result<Self> {
        make_measure(&MeasureSpec::ExpPower { p })
    }

    /// Custom density from closures for `f`, `f'` and `f''`.
    pub fn custom<F, G, H>(label: &str, f: F, df: G, d2f: H) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
        H: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let m = RadialMeasure {
            density: Density::Custom { f: Arc::new(f), df: Arc::new(df), d2f: Arc::new(d2f) },
            spec: None,
            label: label.to_string(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn spec(&self) -> Option<&MeasureSpec> {
        self.spec.as_ref()
    }

    pub fn is_lebesgue(&self) -> bool {
        matches!(self.density, Density::Lebesgue)
    }

    pub fn f(&self, r: f64) -> f64 {
        match &self.density {
            Density::Gaussian => (-0.5 * r * r).exp(),
            Density::ExpPower(p) => (-r.powf(*p)).exp(),
            Density::Lebesgue => 1.0,
            Density::Custom { f, .. } => f(r),
        }
    }

    pub fn df(&self, r: f64) -> f64 {
        match &self.density {
            Density::Gaussian => -r * (-0.5 * r * r).exp(),
            Density::ExpPower(p) => {
                if r == 0.0 {
                    if *p == 1.0 {
                        -1.0
                    } else {
                        0.0
                    }
                } else {
                    -p * r.powf(p - 1.0) * (-r.powf(*p)).exp()
                }
            }
            Density::Lebesgue => 0.0,
            Density::Custom { df, .. } => df(r),
        }
    }

    pub fn d2f(&self, r: f64) -> f64 {
        match &self.density {
            Density::Gaussian => (r * r - 1.0) * (-0.5 * r * r).exp(),
            Density::ExpPower(p) => exp_power_d2(*p, r),
            Density::Lebesgue => 0.0,
            Density::Custom { d2f, .. } => d2f(r),
        }
    }

    fn validate(&self) -> Result<()> {
        for r in validation_radii() {
            let f = self.f(r);
            let df = self.df(r);
            if !(f >= 0.0) {
                return Err(Error::InvalidMeasure { reason: "negative density".into(), radius: r });
            }
            if df > 1e-12 {
                return Err(Error::InvalidMeasure { reason: "density increasing".into(), radius: r });
            }
            if f > 1e-300 {
                let d2 = self.d2f(r);
                let log_second = d2 / f - (df / f).powi(2);
                if log_second > 1e-10 {
                    return Err(Error::InvalidMeasure {
                        reason: format!("density not log-concave ((log f)'' = {log_second:e})"),
                        radius: r,
                    });
                }
            }
        }
        Ok(())
    }

    /// `A(D) = int_0^1 t^{n-1} f(tD) dt`.
    pub fn moment_a(&self, d: f64, n: usize) -> Result<f64> {
        if self.is_lebesgue() {
            return Ok(1.0 / n as f64);
        }
        let k = (n - 1) as i32;
        integrate_adaptive(|t| t.powi(k) * self.f(t * d), 0.0, 1.0, MOMENT_TOL)
    }

    pub fn moment_b(&self, d: f64, n: usize) -> Result<f64> {
        let k = n as i32;
        integrate_adaptive(|t| t.powi(k) * self.df(t * d), 0.0, 1.0, MOMENT_TOL)
    }

    pub fn moment_c(&self, d: f64, n: usize) -> Result<f64> {
        let k = (n + 1) as i32;
        integrate_adaptive(|t| t.powi(k) * self.d2f(t * d), 0.0, 1.0, MOMENT_TOL)
    }
}

/// All three radial moments at radius `d`.
pub fn moments(measure: &RadialMeasure, d: f64, n: usize) -> Result<MomentTriple> {
    if !(d > 0.0) {
        return Err(Error::InvalidParameter(format!("moment radius must be positive, got {d}")));
    }
    // The Lebesgue shortcut in moment_a is bypassed here so every entry
    // comes from the same quadrature.
    let k = (n - 1) as i32;
    let a = integrate_adaptive(|t| t.powi(k) * measure.f(t * d), 0.0, 1.0, MOMENT_TOL)?;
    Ok(MomentTriple { a, b: measure.moment_b(d, n)?, c: measure.moment_c(d, n)?, radius: d, dim: n })
}

/// Residuals of `f(R) = nA + RB` and `f'(R) = (n+1)B + RC`.
pub fn moment_identities(measure: &RadialMeasure, r: f64, n: usize) -> Result<(f64, f64)> {
    let m = moments(measure, r, n)?;
    let nf = n as f64;
    Ok(((measure.f(r) - (nf * m.a + r * m.b)).abs(), (measure.df(r) - ((nf + 1.0) * m.b + r * m.c)).abs()))
}
