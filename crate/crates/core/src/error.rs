use thiserror::Error;

/// Which invariant of a filtered (φ,N)-module failed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantViolation {
    #[error("phi is not invertible")]
    NonInvertiblePhi,
    #[error("N is not nilpotent")]
    NonNilpotentN,
    #[error("commutation relation N*phi = q*phi*N fails")]
    Commutation,
    #[error("filtration failure: {0}")]
    Filtration(String),
}

impl InvariantViolation {
    pub fn name(&self) -> &'static str {
        match self {
            InvariantViolation::NonInvertiblePhi => "non_invertible_phi",
            InvariantViolation::NonNilpotentN => "non_nilpotent_n",
            InvariantViolation::Commutation => "commutation_failure",
            InvariantViolation::Filtration(_) => "filtration_failure",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("polynomial has zero constant term; phi is not invertible")]
    ZeroConstantTerm,
    #[error("invalid (phi,N)-module: {0}")]
    Invariant(InvariantViolation),
    #[error("N^{} is nonzero", .d + 1)]
    NilpotencyOrder { d: u32 },
    #[error("irreducible factor of the characteristic polynomial has roots of mixed slopes: {0}")]
    MixedSlopeFactor(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error("enumeration budget of {0} exceeded")]
    Budget(usize),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("internal cross-check failed: {0}")]
    CrossCheck(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    InvalidInput,
    Precondition,
    CrossCheck,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse(_) => ErrorKind::InvalidInput,
            Error::CrossCheck(_) => ErrorKind::CrossCheck,
            _ => ErrorKind::Precondition,
        }
    }
}

impl From<InvariantViolation> for Error {
    fn from(v: InvariantViolation) -> Self {
        Error::Invariant(v)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
