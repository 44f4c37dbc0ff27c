use thiserror::Error;

/// Errors raised by the solvers, the instance toolkit and the certificate checks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("vector is not a unit vector (norm {norm})")]
    NotUnitVector { norm: f64 },

    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("column {index} is zero")]
    DegenerateColumn { index: usize },

    #[error("matrix has rank {rank} but {rows} rows; full row rank is required")]
    RankDeficient { rank: usize, rows: usize },

    #[error("entry at ({row}, {col}) is not an integer")]
    NonInteger { row: usize, col: usize },

    #[error("instance outside the supported desk scale: {0}")]
    Unsupported(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("oracle fault: {0}")]
    OracleFault(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("generator gave up after {attempts} attempts: {reason}")]
    ResampleBudget { attempts: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
