use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    DimBmInfinitesimal,
    LogBmInfinitesimal,
    B1B2,
    LogbmBallForm,
    ScanDimBm,
    ScanLogBm,
    ShiftCounterexample,
    ConeMeasureForm,
    StrengthenedMinkowski,
}

impl CheckId {
    pub const ALL: [CheckId; 9] = [
        CheckId::DimBmInfinitesimal,
        CheckId::LogBmInfinitesimal,
        CheckId::B1B2,
        CheckId::LogbmBallForm,
        CheckId::ScanDimBm,
        CheckId::ScanLogBm,
        CheckId::ShiftCounterexample,
        CheckId::ConeMeasureForm,
        CheckId::StrengthenedMinkowski,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::DimBmInfinitesimal => "dim_bm_infinitesimal",
            CheckId::LogBmInfinitesimal => "log_bm_infinitesimal",
            CheckId::B1B2 => "b1_b2",
            CheckId::LogbmBallForm => "logbm_ball_form",
            CheckId::ScanDimBm => "scan_dim_bm",
            CheckId::ScanLogBm => "scan_log_bm",
            CheckId::ShiftCounterexample => "shift_counterexample",
            CheckId::ConeMeasureForm => "cone_measure_form",
            CheckId::StrengthenedMinkowski => "strengthened_minkowski",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            CheckId::DimBmInfinitesimal => "g''(0) g(0) <= (n-1)/n g'(0)^2 along an additive family",
            CheckId::LogBmInfinitesimal => "(log g)''(0) <= 0 along a multiplicative family",
            CheckId::B1B2 => "B1(psi) <= B2(psi) at a ball, with the mean/zero-mean decomposition",
            CheckId::LogbmBallForm => "log-BM second-variation inequality at a ball, with the eigenvalue-2n chain",
            CheckId::ScanDimBm => "gamma(lK1+(1-l)K2)^(1/n) >= l gamma(K1)^(1/n) + (1-l) gamma(K2)^(1/n) near a ball",
            CheckId::ScanLogBm => "gamma(K1^l K2^(1-l)) >= gamma(K1)^l gamma(K2)^(1-l) near a ball, even phi",
            CheckId::ShiftCounterexample => "geometric mean of a shifted disk and the disk has area below pi R^2",
            CheckId::ConeMeasureForm => "infinitesimal log-BM inequality in cone-measure form",
            CheckId::StrengthenedMinkowski => "strengthened Minkowski second inequality (ball-calibrated constants)",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckId::ALL.iter().copied().find(|c| c.as_str() == s).ok_or_else(|| format!("unknown check `{s}`"))
    }
}

/// Everything needed to re-run a check.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub n: usize,
    pub resolution: usize,
    pub radius: f64,
    pub measure: String,
    pub direction: String,
    pub parity: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub name: String,
    pub value: f64,
    pub diff: f64,
}

/// Outcome of one inequality check. `margin >= 0` means the inequality
/// holds; `lhs` and `rhs` are kept as evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: CheckId,
    pub params: ReportParams,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// The inputs violate a hypothesis and the check demonstrates failure;
    /// it passes when the margin is negative.
    pub expected_failure: bool,
    pub oracle: Option<OracleCheck>,
    pub details: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(check: CheckId, params: ReportParams, lhs: f64, rhs: f64, margin: f64) -> Self {
        let mut r = Self {
            check,
            params,
            lhs,
            rhs,
            margin,
            tolerance: DEFAULT_TOLERANCE,
            pass: false,
            expected_failure: false,
            oracle: None,
            details: BTreeMap::new(),
            notes: Vec::new(),
        };
        r.update_pass();
        r
    }

    fn update_pass(&mut self) {
        self.pass = if self.expected_failure { self.margin < -self.tolerance } else { self.margin >= -self.tolerance };
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self.update_pass();
        self
    }

    pub fn expecting_failure(mut self, expected: bool) -> Self {
        self.expected_failure = expected;
        self.update_pass();
        self
    }

    pub fn with_oracle(mut self, name: &str, value: f64, reference: f64) -> Self {
        self.oracle = Some(OracleCheck { name: name.to_string(), value, diff: (value - reference).abs() });
        self
    }

    pub fn detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn oracle_diff(&self) -> Option<f64> {
        self.oracle.as_ref().map(|o| o.diff)
    }
}

/// Smallest margin in a list of reports.
pub fn min_margin(reports: &[VerificationReport]) -> f64 {
    reports.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min)
}
