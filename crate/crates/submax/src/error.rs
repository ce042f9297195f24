use thiserror::Error;

/// Errors produced by construction and solver routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible region: {0}")]
    InfeasibleRegion(String),

    #[error("point outside feasible region: {0}")]
    InfeasiblePoint(String),

    #[error("iteration cap exceeded: {0}")]
    CapExceeded(String),

    #[error("inner result computed at a different anchor point")]
    StaleInnerResult,

    #[error("ground set too large: {got} > cap {cap}")]
    GroundSetTooLarge { got: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
