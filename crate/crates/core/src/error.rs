use thiserror::Error;

/// Errors raised by law construction, exact computations and estimators.
#[derive(Debug, Error)]
pub enum RwreError {
    #[error("invalid law: {0}")]
    InvalidLaw(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("operation requires a one-dimensional law with u_hat = +1")]
    NotOneDimensional,

    #[error("law is not of restricted-path type: {0}")]
    NotRestrictedPath(String),

    #[error("support size {size} exceeds cap {cap}; raise the pruning threshold or the cap")]
    SupportCapExceeded { size: usize, cap: usize },

    #[error("truncation tolerance {tol:e} not reached within index cap {cap}; achieved bound {achieved:e}")]
    TruncationFailed { tol: f64, cap: usize, achieved: f64 },

    #[error("horizon of {cap} exhausted: {what}")]
    HorizonExceeded { what: String, cap: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, RwreError>;
