//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix asymmetry {max_dev:.3e} exceeds tolerance {tol:.3e}")]
    NotSymmetric { max_dev: f64, tol: f64 },

    #[error("eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),

    #[error("matrix is not positive definite (smallest eigenvalue {0:.3e})")]
    NotPositiveDefinite(f64),

    #[error("rank-deficient matrix in least-squares solve")]
    RankDeficient,

    #[error("empty matrix")]
    EmptyMatrix,

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("column {0} has zero norm")]
    ZeroColumn(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("C({p},{s}) = {count} subsets exceeds cap {cap}; instance too large for exhaustive certification")]
    SubsetCapExceeded { p: usize, s: usize, count: u128, cap: u64 },

    #[error("sigma and sigma0 are both zero")]
    NoNoise,

    #[error("{path}:{line}: {msg}")]
    Config { path: String, line: usize, msg: String },

    #[error("malformed {what} at line {line}: {msg}")]
    Parse { what: &'static str, line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code class for the CLI: 1 usage/config, 2 numerical
    /// precondition violation.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config { .. } | Error::Parse { .. } | Error::Io(_) | Error::InvalidParameter(_) => 1,
            _ => 2,
        }
    }
}
