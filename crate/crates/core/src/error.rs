use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("function does not have zero mean (integral {0:e})")]
    NonZeroMean(f64),

    #[error("function vanishes identically on the grid")]
    ZeroFunction,

    #[error("invalid measure at r = {radius}: {reason}")]
    InvalidMeasure { reason: String, radius: f64 },

    #[error("quadrature did not converge on [{a}, {b}] (error estimate {estimate:e})")]
    QuadratureNonConvergence { a: f64, b: f64, estimate: f64 },

    #[error("support function is not positive at node {node} (h = {value:e})")]
    NonPositiveSupport { node: usize, value: f64 },

    #[error("not convex: curvature matrix has eigenvalue {eigenvalue:e} at node {node}")]
    NotConvex { node: usize, eigenvalue: f64 },

    #[error("degenerate perturbation family: even s = {0:e} leaves the admissible class")]
    DegenerateFamily(f64),

    #[error("s = {s} outside the validity interval [-{a}, {a}]")]
    OutsideValidity { s: f64, a: f64 },

    #[error("epsilon exceeds validity radius a={a} (epsilon_max = {epsilon})")]
    EpsilonExceedsValidity { epsilon: f64, a: f64 },

    #[error("matrix is not symmetric")]
    NonSymmetric,

    #[error("black-box functions do not provide the derivatives required here")]
    BlackBoxUnsupported,

    #[error("finite-difference step must be positive, got {0}")]
    InvalidStep(f64),

    #[error("operation requires an additive perturbation family")]
    RequiresAdditive,

    #[error("direction must be even: odd component of size {0:e}")]
    OddDirection(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
