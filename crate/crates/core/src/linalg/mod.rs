//! Small dense kernels for the projected problems.

mod cholesky;
mod svd;

pub use cholesky::{solve_shifted_normal, ShiftedNormalFactor};
pub use svd::{svd_small, SmallSvd, DEFAULT_RANK_TOL};
