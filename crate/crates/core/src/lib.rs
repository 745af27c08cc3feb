//! Iterated Tikhonov regularization in Krylov subspaces.
//!
//! The crate solves large linear discrete ill-posed problems `T x = y_delta`
//! by projecting them onto a small Krylov subspace and applying iterated
//! Tikhonov regularization to the projected problem:
//!
//! * [`krylov::golub_kahan_bidiagonalize`] builds `T V = U B` with a lower
//!   bidiagonal `B`; [`regularize::igkt_solve`] is the iterated
//!   Golub-Kahan-Tikhonov (iGKT) method built on it. With one iteration it is
//!   the plain Golub-Kahan-Tikhonov method.
//! * [`krylov::arnoldi_decompose`] builds `T V_l = V_{l+1} H` for square
//!   operators; [`regularize::iat_solve`] is the iterated Arnoldi-Tikhonov
//!   counterpart.
//! * [`param`] selects the regularization parameter as the unique root of a
//!   monotone equation in the singular-value basis of the projected matrix.
//!
//! Operators are matrix free ([`operator::LinearOperator`]); dense matrices
//! are only materialised for the projected problems and for small oracle
//! computations. Synthetic test problems live in [`problems`].

// NaN must fail positivity checks, so `!(x > 0.0)` is used deliberately.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod io;
pub mod krylov;
pub mod linalg;
pub mod operator;
pub mod param;
pub mod problems;
pub mod regularize;
pub mod rng;
pub mod vector;

pub use error::{Error, Result};
pub use krylov::{
    arnoldi_decompose, estimate_h_ell, golub_kahan_bidiagonalize, AnyDecomposition, ArnoldiDecomposition,
    BidiagDecomposition, KrylovDecomposition, KrylovOptions, Reorthogonalization,
};
pub use linalg::{solve_shifted_normal, svd_small, ShiftedNormalFactor, SmallSvd};
pub use operator::{spectral_norm_estimate, DenseMatrix, LinearOperator, PowerConfig};
pub use param::{AlphaSolution, ParamStrategy, ProjectedData};
pub use problems::TestProblem;
pub use regularize::{iat_solve, igkt_solve, Method, ProjectedSolver, RegularizationConfig, SolveReport};
