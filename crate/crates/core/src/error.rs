use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("invalid number `{0}`")]
    Number(String),
    #[error("invalid polynomial line {line}: {reason}")]
    PolynomialLine { line: usize, reason: String },
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid frequencies: {0}")]
    InvalidFrequencies(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("search budget exceeded after scanning {scanned} denominators")]
    SearchBudgetExceeded { scanned: u64 },

    /// Dirichlet's theorem guarantees a solution; not finding one is a bug.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("empty series")]
    EmptySeries,

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
