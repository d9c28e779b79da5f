use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("operation not supported: {0}")]
    Unsupported(String),

    #[error("infeasible intersection: {0}")]
    Infeasible(String),

    #[error("iteration cap exceeded in {0}")]
    IterationCap(String),

    #[error("projection failed: {0}")]
    ProjectionFailure(String),

    #[error("resolvent solve failed: {0}")]
    ResolventFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
