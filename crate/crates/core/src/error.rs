use thiserror::Error;

/// Errors raised by the library.
///
/// Infeasible parameter equations are *not* errors; they are reported through
/// [`crate::param::AlphaSolution::Infeasible`] and the `feasible` flag of a
/// [`crate::regularize::SolveReport`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected length {expected}, got {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{context} requires a square operator, got {rows}x{cols}")]
    NonSquare {
        context: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("starting vector is zero")]
    ZeroVector,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("Krylov process broke down at its first step (data orthogonal to the range)")]
    TrivialKrylovSpace,

    #[error("matrix is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}
