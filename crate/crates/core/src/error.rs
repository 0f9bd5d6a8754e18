use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value {value} outside the admissible domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("grid too coarse: need at least {required} intervals, got {actual}")]
    GridTooCoarse { required: usize, actual: usize },

    #[error("dimension mismatch: expected {expected} samples, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("mode index must be at least 1, got {0}")]
    InvalidMode(usize),

    #[error("kernel series is not summable for t - tau = {0} <= 0")]
    KernelSingularity(f64),

    #[error("regularization parameter must be positive, got {0}")]
    NonPositiveAlpha(f64),

    #[error("normal-equation matrix is not positive definite (alpha = {0:e})")]
    Singular(f64),

    #[error(
        "noise dominates the data: ||f_delta|| = {data_norm} <= delta = {delta}; \
         the discrepancy equation has no solution unless ||f_delta|| > delta"
    )]
    NoiseDominates { data_norm: f64, delta: f64 },

    #[error(
        "smallest attainable residual {residual:e} exceeds delta = {delta:e}; \
         the noise level is below the discretization error"
    )]
    ResidualFloor { residual: f64, delta: f64 },

    #[error("could not bracket the discrepancy root within {0} expansions")]
    BracketingFailed(usize),

    #[error("malformed operator cache: {0}")]
    BadCache(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
