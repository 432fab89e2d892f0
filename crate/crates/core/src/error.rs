use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] io::Error),

    /// Malformed Matrix Market content. `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported matrix market format: {0}")]
    Unsupported(String),

    #[error("matrix is not square ({rows} x {cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric: |A[{row},{col}] - A[{col},{row}]| = {diff:e}")]
    NotSymmetric { row: usize, col: usize, diff: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid interval [{alpha}, {beta}]: {reason}")]
    InvalidInterval {
        alpha: f64,
        beta: f64,
        reason: String,
    },

    #[error("interval [{alpha}, {beta}] lies outside the spectrum [{lambda_min}, {lambda_max}]")]
    OutsideSpectrum {
        alpha: f64,
        beta: f64,
        lambda_min: f64,
        lambda_max: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is a multiple of the identity: all eigenvalues equal {0}")]
    DegenerateSpectrum(f64),

    #[error("krylov dimension limit {max_dim} exceeded")]
    MaxDimExceeded { max_dim: usize },

    #[error("tridiagonal QL iteration failed to converge for eigenvalue {index}")]
    NoConvergence { index: usize },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn interval(alpha: f64, beta: f64, reason: impl Into<String>) -> Self {
        Error::InvalidInterval {
            alpha,
            beta,
            reason: reason.into(),
        }
    }
}
