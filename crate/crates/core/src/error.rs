use thiserror::Error;

/// Errors raised by operator construction, quadrature and spectrum extraction.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("inconsistent configuration: {0}")]
    Config(String),

    #[error("rank-deficient fit: {0}")]
    RankDeficient(String),
}

pub type Result<T> = std::result::Result<T, Error>;
