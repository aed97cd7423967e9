use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("unavailable: {0}")]
    Unavailable(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("path length {got} does not match scheme length {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("quadrature did not converge: error estimate {error_estimate:e} exceeds target {target:e}")]
    Quadrature { error_estimate: f64, target: f64 },

    #[error("degenerate: {0}")]
    Degenerate(String),

    #[error("malformed report: {0}")]
    Report(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
