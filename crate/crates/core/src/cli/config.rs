use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bodies::FamilyKind;
use crate::inequalities::{CheckId, DEFAULT_TOLERANCE};
use crate::measures::MeasureSpec;
use crate::polynomial::Polynomial;
use crate::sphere_core::{SphericalFunction, MAX_RESOLUTION, MIN_RESOLUTION};

pub const SCHEMA_VERSION: u32 = 1;

/// A configuration problem, tied to the key that caused it.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: &str, message: impl Into<String>) -> Self {
        Self { key: key.to_string(), message: message.into() }
    }
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config key `{}`: {}", self.key, self.message)
    }
}

/// One term of a polynomial direction: a monomial `coeff * u^powers`, or
/// `coeff * cos(k theta)` / `coeff * sin(k theta)` on the circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum Term {
    Monomial { coeff: f64, powers: Vec<u32> },
    Cos { coeff: f64, cos: u32 },
    Sin { coeff: f64, sin: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    /// `additive`: the terms give `psi`; `multiplicative`: they give `log phi`.
    pub kind: FamilyKind,
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_tol")]
    pub margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { margin: DEFAULT_TOLERANCE }
    }
}

fn default_tol() -> f64 {
    DEFAULT_TOLERANCE
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSpec {
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub n: usize,
    pub resolution: usize,
    pub measure: MeasureSpec,
    #[serde(default = "one")]
    pub radius: f64,
    pub perturbation: PerturbationSpec,
    /// Support function of the body used by the body-level checks; the
    /// ball of radius `radius` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<Vec<Term>>,
    pub epsilon_max: f64,
    #[serde(default = "default_lambda_steps")]
    pub lambda_steps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub checks: Vec<CheckId>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_t")]
    pub t: f64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarloSpec>,
}

fn one() -> f64 {
    1.0
}

fn default_lambda_steps() -> usize {
    20
}

fn default_t() -> f64 {
    0.3
}

fn default_lambda() -> f64 {
    0.5
}

pub fn terms_to_function(n: usize, terms: &[Term], key: &str) -> Result<SphericalFunction, ConfigError> {
    let mut p = Polynomial::zero(n);
    for (i, t) in terms.iter().enumerate() {
        let k = format!("{key}[{i}]");
        let part = match t {
            Term::Monomial { coeff, powers } => {
                if powers.len() != n {
                    return Err(ConfigError::new(&k, format!("powers must have {n} entries, got {}", powers.len())));
                }
                Polynomial::monomial(n, powers.clone(), *coeff)
            }
            Term::Cos { coeff, cos } if n == 2 => Polynomial::cos_k(*cos).scale(*coeff),
            Term::Sin { coeff, sin } if n == 2 => Polynomial::sin_k(*sin).scale(*coeff),
            _ => return Err(ConfigError::new(&k, "cos/sin terms are only available for n = 2")),
        };
        p = p.add(&part);
    }
    Ok(SphericalFunction::polynomial(p))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError::new(&key_of(&e), e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            fs::read_to_string(path).map_err(|e| ConfigError::new("config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::new(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        if self.n < 2 {
            return Err(ConfigError::new("n", format!("dimension must be at least 2, got {}", self.n)));
        }
        if !(MIN_RESOLUTION..=MAX_RESOLUTION).contains(&self.resolution) {
            return Err(ConfigError::new(
                "resolution",
                format!("must lie in [{MIN_RESOLUTION}, {MAX_RESOLUTION}], got {}", self.resolution),
            ));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(ConfigError::new("radius", format!("must be positive, got {}", self.radius)));
        }
        if !(self.epsilon_max > 0.0 && self.epsilon_max.is_finite()) {
            return Err(ConfigError::new("epsilon_max", format!("must be positive, got {}", self.epsilon_max)));
        }
        if self.lambda_steps == 0 {
            return Err(ConfigError::new("lambda_steps", "must be at least 1"));
        }
        if self.checks.is_empty() {
            return Err(ConfigError::new("checks", "no checks requested"));
        }
        if !(self.tolerances.margin >= 0.0) {
            return Err(ConfigError::new("tolerances.margin", "must be nonnegative"));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(ConfigError::new("lambda", format!("must lie in [0, 1], got {}", self.lambda)));
        }
        if self.checks.contains(&CheckId::ShiftCounterexample) {
            if self.n != 2 {
                return Err(ConfigError::new("n", "shift_counterexample needs n = 2"));
            }
            if !(0.0..self.radius).contains(&self.t) {
                return Err(ConfigError::new("t", format!("must satisfy 0 <= t < radius, got {}", self.t)));
            }
        }
        if let Some(mc) = &self.monte_carlo {
            if mc.samples < crate::oracles::mc::MIN_SAMPLES {
                return Err(ConfigError::new(
                    "monte_carlo.samples",
                    format!("need at least {}", crate::oracles::mc::MIN_SAMPLES),
                ));
            }
        }
        self.direction()?;
        self.body_support()?;
        Ok(())
    }

    /// The polynomial of the `perturbation` block.
    pub fn direction(&self) -> Result<SphericalFunction, ConfigError> {
        terms_to_function(self.n, &self.perturbation.terms, "perturbation.terms")
    }

    /// Additive direction `psi` and multiplicative direction `phi`, related
    /// by `psi = R log phi`.
    pub fn directions(&self) -> Result<(SphericalFunction, SphericalFunction), ConfigError> {
        let p = self.direction()?;
        Ok(match self.perturbation.kind {
            FamilyKind::Additive => (p.clone(), p.scale(1.0 / self.radius).exp()),
            FamilyKind::Multiplicative => (p.scale(self.radius), p.exp()),
        })
    }

    pub fn body_support(&self) -> Result<SphericalFunction, ConfigError> {
        match &self.body {
            Some(terms) => terms_to_function(self.n, terms, "body"),
            None => Ok(SphericalFunction::constant(self.n, self.radius)),
        }
    }
}

/// Best effort at the key named in a serde error message.
fn key_of(e: &serde_json::Error) -> String {
    let msg = e.to_string();
    for marker in ["unknown field `", "missing field `", "unknown variant `"] {
        if let Some(i) = msg.find(marker) {
            let rest = &msg[i + marker.len()..];
            if let Some(j) = rest.find('`') {
                return rest[..j].to_string();
            }
        }
    }
    "config".to_string()
}
