use thiserror::Error;

/// Errors raised by the geometry, flow and analysis layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("profile touches the axis at node {index} (rho = {rho:e})")]
    AxisContact { index: usize, rho: f64 },

    #[error("Simpson quadrature needs an even number of intervals, got {0}")]
    OddIntervalCount(usize),

    #[error("non-finite value encountered during integration")]
    NonFinite,

    #[error("time step underflow (dt = {0:e})")]
    StepUnderflow(f64),

    #[error("need at least 3 states for a time derivative, got {0}")]
    InsufficientHistory(usize),

    #[error("states are not equally spaced in time")]
    UnequalSpacing,

    #[error("states do not share a grid")]
    GridMismatch,

    #[error("blow-up window has {found} states, need at least {required}")]
    InsufficientBlowupData { found: usize, required: usize },

    #[error("degenerate rate fit: {0}")]
    DegenerateFit(String),

    #[error("rescaled window has {intervals} intervals, need at least 8")]
    EmptyWindow { intervals: usize },

    #[error("profile has no strict interior minimum")]
    NoInteriorMinimum,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
