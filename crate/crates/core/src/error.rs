use thiserror::Error;

/// Errors raised by model construction, solvers and post-processing.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid reaction: {0}")]
    InvalidReaction(String),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("negative density {0} passed to the reaction term")]
    NegativeDensity(f64),

    #[error("truncation radius too small: d(l1 - 1) + f'(0) = {margin} <= 0")]
    TruncationTooSmall { margin: f64 },

    #[error("grid spacing {dx} too coarse for kernel core width {core}")]
    GridTooCoarse { dx: f64, core: f64 },

    #[error("boundary cannot move backwards: {from} -> {to}")]
    BoundaryRetreat { from: f64, to: f64 },

    #[error("time step {dt} exceeds stability bound {bound}")]
    UnstableTimeStep { dt: f64, bound: f64 },

    #[error("non-finite value at node {node} (t = {t})")]
    NonFinite { t: f64, node: usize },

    #[error("positivity violated at node {node}: {value}")]
    Positivity { node: usize, value: f64 },

    #[error("front reached the truncation monitor at t = {t} (w = {value:e}); enlarge L")]
    EnlargeDomain { t: f64, value: f64 },

    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("plateau not reached: value {value} at truncation, expected {expected}")]
    PlateauNotReached { value: f64, expected: f64 },

    #[error("kernel has infinite first moment: no finite semi-wave speed")]
    InfiniteFirstMoment,

    #[error("kernel has no finite exponential moment: no finite minimal speed")]
    NoExponentialMoment,

    #[error("level {lambda} out of range [{lo}, {hi})")]
    LevelOutOfRange { lambda: f64, lo: f64, hi: f64 },

    #[error("fit window holds {0} samples, need at least 10")]
    WindowTooShort(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("ordering violated at t = {t}, x = {x}: lower {lower} > upper {upper}")]
    OrderingViolation {
        t: f64,
        x: f64,
        lower: f64,
        upper: f64,
    },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("config error: {0}")]
    Config(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field: field.to_string(),
        reason: reason.into(),
    }
}
