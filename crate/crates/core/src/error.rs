use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is singular over GF(2)")]
    Singular,

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid parameters: {0}")]
    Parameter(String),

    #[error("invalid state: {0}")]
    State(String),

    #[error("termination failed: {0}")]
    Termination(String),

    #[error("termination block still rank deficient after {attempts} resampling attempts (rank {rank} of {size})")]
    RankRepair { attempts: u32, rank: usize, size: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn dim(expected: usize, found: usize) -> Self {
        Error::Dimension { expected, found }
    }
}
