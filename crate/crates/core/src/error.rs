//! Error type shared across the crate.

use thiserror::Error;

/// Errors reported by projection, modeling, and solver operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Input dimensions do not agree (vector lengths, block sizes).
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An input contains NaN or infinity.
    #[error("non-finite input: {0}")]
    NonFinite(String),

    /// A line search exhausted its trial budget, which signals an
    /// inconsistency between the objective and its gradient.
    #[error("line search failed after {0} step trials")]
    StepFailure(u32),

    /// The operation is not defined for this problem shape.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// An internal invariant was violated; indicates a bug, not bad input.
    #[error("internal inconsistency: {0}")]
    Internal(String),

    /// Reading or writing external data failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
