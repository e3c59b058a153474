use thiserror::Error;

/// Errors raised by the lattice, transform and classification routines.
///
/// Variants split into two families: malformed input (bad files, unknown
/// names, mismatched dimensions) and mathematical rejection (a stated
/// identity or criterion does not hold for otherwise well-formed data).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),
    #[error("dimension error: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("undeclared class referenced: {0}")]
    UnknownTarget(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("non-integral value: {0}")]
    NonIntegral(String),
    #[error("violation: {0}")]
    Violation(String),
    #[error("bound {bound} is too small to be conclusive (need at least {needed})")]
    BoundTooSmall { bound: i64, needed: i64 },
}

impl Error {
    /// True when the error is a mathematical rejection rather than bad input.
    pub fn is_rejection(&self) -> bool {
        matches!(self, Error::Violation(_) | Error::NonIntegral(_))
    }

    pub fn violation(msg: impl Into<String>) -> Self {
        Error::Violation(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
