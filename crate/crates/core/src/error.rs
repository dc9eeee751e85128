//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by algebra, module, and frame operations.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Two operands live in different algebras.
    #[error("algebra descriptor mismatch: expected {expected}, found {found}")]
    DescriptorMismatch { expected: String, found: String },

    /// Vector ranks or sequence lengths do not line up.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// An element whose spectrum touches zero cannot be inverted.
    #[error("element is not invertible: smallest spectral value {min_spectral} <= tolerance {tol}")]
    NotInvertible { min_spectral: f64, tol: f64 },

    /// The requested operation needs a commutative algebra.
    #[error("operation requires a commutative algebra, got {0}")]
    NonCommutative(String),

    /// A-independence is only decidable here over commutative algebras.
    #[error("unsupported algebra for this operation: {0}")]
    UnsupportedAlgebra(String),

    /// The vector family fails the lower frame inequality.
    #[error("not a frame: lower bound {a_opt:.3e} is within tolerance of zero (upper {b_opt:.3e})")]
    NotAFrame { a_opt: f64, b_opt: f64 },

    /// Input is degenerate for the requested check (e.g. zero 2-norm).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// The vectors are A-dependent where independence is required.
    #[error("vectors are A-dependent: {0}")]
    Dependent(String),

    /// Random instance generation exhausted its retry budget.
    #[error("instance generation failed after {retries} retries: {reason}")]
    GenerationFailed { retries: usize, reason: String },

    /// Invalid argument (bad rank, bounds ordering, tolerance, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An internal consistency check failed; indicates a bug.
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
