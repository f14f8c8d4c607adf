//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by generalized-number, set, and function operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A log-domain magnitude left the representable budget (|log value| > 700).
    #[error("magnitude overflow: log|x| = {log_abs:.3} exceeds the budget of {budget:.0}")]
    MagnitudeOverflow { log_abs: f64, budget: f64 },

    /// Two sampled nets live on different evaluation grids.
    #[error("operands are sampled on different grids")]
    GridMismatch,

    /// Vector operands of different dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The index sets handed to an interleaving do not partition the grid.
    #[error("not a partition of the grid: {0}")]
    PartitionError(String),

    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    PreconditionError(String),

    /// A set that was required to sit inside another does not.
    #[error("containment failed: {0}")]
    ContainmentError(String),

    /// The operation needs a nonempty set.
    #[error("empty set: {0}")]
    EmptySetError(String),

    /// A point left the domain of a primitive during evaluation.
    #[error("evaluation domain error: {0}")]
    EvalDomainError(String),

    /// Malformed textual input; `pos` is a byte offset into the source.
    #[error("parse error at byte {pos}: {msg}")]
    ParseError { pos: usize, msg: String },

    /// A sequence handed to the completion routine fails its Cauchy gap.
    #[error("sequence is not Cauchy at step {step}: {msg}")]
    NotCauchyError { step: usize, msg: String },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
