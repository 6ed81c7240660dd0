use thiserror::Error;

/// Errors raised across the solver, diagnostics and scenario layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("initial data: {0}")]
    InitialData(String),

    #[error("compatibility violated at t = 0: {0}")]
    Compatibility(String),

    #[error("argument {0} outside supported range")]
    OutOfRange(f64),

    #[error("singular system at pivot {0}")]
    Singular(usize),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("support check failed: {0}")]
    Support(String),

    #[error("direction mismatch: {0}")]
    Direction(String),

    #[error("series too short: need {needed} samples, have {have}")]
    ShortSeries { needed: usize, have: usize },

    #[error("precondition: {0}")]
    Precondition(String),

    #[error("non-finite values at t = {t}")]
    NonFinite { t: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
