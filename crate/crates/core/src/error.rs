use thiserror::Error;

/// Errors raised by lattice computations.
///
/// The variants fall into three families that the CLI maps onto exit codes:
/// malformed input, violated mathematical preconditions, and inconsistent data.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("degenerate lattice: {0}")]
    Degenerate(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported prime {0}")]
    UnsupportedPrime(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("structure error: {0}")]
    Structure(String),

    #[error("inconsistent data: {0}")]
    Inconsistent(String),
}

impl LatticeError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        LatticeError::InvalidInput(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        LatticeError::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, LatticeError>;
