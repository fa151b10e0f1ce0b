//! Error types shared across the crate.

use crate::types::SvmSolution;
use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, SvmError>;

/// Errors produced by solvers, builders and generators.
#[derive(Error, Debug)]
pub enum SvmError {
    /// An argument failed validation (non-finite data, bad parameter range, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two containers that must agree in length did not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A matrix that must be positive definite (after delta augmentation) is not.
    #[error("ill-conditioned problem: {0}")]
    IllConditioned(String),

    /// The solver hit its iteration cap. The best iterate found so far is attached.
    #[error("solver did not converge: residual KKT violation {violation:.3e}")]
    NonConvergence {
        violation: f64,
        best: Box<SvmSolution>,
    },

    /// A numeric evaluation left the representable range (pole hit, overflow, ...).
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// File I/O or parse failure on CSV / config input.
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for SvmError {
    fn from(e: std::io::Error) -> Self {
        SvmError::Io(e.to_string())
    }
}
