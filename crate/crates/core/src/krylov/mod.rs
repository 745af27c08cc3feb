//! Golub-Kahan bidiagonalization, the Arnoldi process and the bound `h_l`.

mod arnoldi;
mod bidiag;
mod residual;

pub use arnoldi::{arnoldi_decompose, ArnoldiDecomposition};
pub use bidiag::{golub_kahan_bidiagonalize, BidiagDecomposition};

pub use residual::{estimate_h_ell, ResidualOperator, H_ELL_SAFETY};

use crate::error::{Error, Result};
use crate::operator::{spectral_norm_estimate, DenseMatrix, LinearOperator, PowerConfig};
use crate::vector::{combine, norm};

/// Reorthogonalization policy for new basis vectors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Reorthogonalization {
    /// Plain recurrence (one modified Gram-Schmidt pass for Arnoldi).
    None,
    /// Orthogonalize every new vector against all previous ones, twice.
    #[default]
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrylovOptions {
    pub reorth: Reorthogonalization,
    /// A recurrence coefficient below `breakdown_tol * ||T||` ends the process.
    pub breakdown_tol: f64,
    /// Power iteration used for the `||T||` reference of the breakdown test.
    pub norm_power: PowerConfig,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self {
            reorth: Reorthogonalization::Full,
            breakdown_tol: 1e-12,
            norm_power: PowerConfig {
                max_iters: 30,
                rel_tol: 1e-4,
                seed: PowerConfig::default().seed,
            },
        }
    }
}

/// Where and why a Krylov process stopped early.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Breakdown {
    /// 1-based step at which a coefficient vanished.
    pub step: usize,
    /// The vanished coefficient.
    pub value: f64,
}

/// Common view of `T V = L M`: a right basis `V`, a left basis `L` and the
/// projected matrix `M`.
///
/// Without breakdown `M` is `(l_eff + 1) x l_eff`; after a terminal breakdown
/// the extra left vector does not exist and `M` is square.
pub trait KrylovDecomposition: Send + Sync {
    fn projected(&self) -> &DenseMatrix;
    fn left_basis(&self) -> &[Vec<f64>];
    fn right_basis(&self) -> &[Vec<f64>];
    fn ell_requested(&self) -> usize;
    fn breakdown(&self) -> Option<Breakdown>;
    /// Reference value of `||T||_2` used by the breakdown test.
    fn norm_estimate(&self) -> f64;

    fn ell_eff(&self) -> usize {
        self.right_basis().len()
    }

    /// `L^T y`.
    fn project_left(&self, y: &[f64]) -> Vec<f64> {
        crate::vector::project(self.left_basis(), y)
    }

    /// `V z`.
    fn expand(&self, z: &[f64]) -> Vec<f64> {
        let n = self.right_basis().first().map_or(0, Vec::len);
        combine(self.right_basis(), z, n)
    }
}

/// Either kind of decomposition, as produced by a [`crate::Method`].
#[derive(Clone, Debug)]
pub enum AnyDecomposition {
    Bidiag(BidiagDecomposition),
    Arnoldi(ArnoldiDecomposition),
}

impl AnyDecomposition {
    fn inner(&self) -> &dyn KrylovDecomposition {
        match self {
            Self::Bidiag(d) => d,
            Self::Arnoldi(d) => d,
        }
    }

    /// The decomposition after its first `ell` steps.
    pub fn truncated(&self, ell: usize) -> Result<Self> {
        Ok(match self {
            Self::Bidiag(d) => Self::Bidiag(d.truncated(ell)?),
            Self::Arnoldi(d) => Self::Arnoldi(d.truncated(ell)?),
        })
    }
}

impl From<BidiagDecomposition> for AnyDecomposition {
    fn from(d: BidiagDecomposition) -> Self {
        Self::Bidiag(d)
    }
}

impl From<ArnoldiDecomposition> for AnyDecomposition {
    fn from(d: ArnoldiDecomposition) -> Self {
        Self::Arnoldi(d)
    }
}

impl KrylovDecomposition for AnyDecomposition {
    fn projected(&self) -> &DenseMatrix {
        self.inner().projected()
    }
    fn left_basis(&self) -> &[Vec<f64>] {
        self.inner().left_basis()
    }
    fn right_basis(&self) -> &[Vec<f64>] {
        self.inner().right_basis()
    }
    fn ell_requested(&self) -> usize {
        self.inner().ell_requested()
    }
    fn breakdown(&self) -> Option<Breakdown> {
        self.inner().breakdown()
    }
    fn norm_estimate(&self) -> f64 {
        self.inner().norm_estimate()
    }
}

pub(crate) fn validate(op: &dyn LinearOperator, y: &[f64], ell: usize) -> Result<f64> {
    crate::error::check_len("Krylov starting vector", op.n_rows(), y.len())?;
    let max = op.n_rows().min(op.n_cols());
    if ell == 0 || ell > max {
        return Err(Error::InvalidArgument(format!(
            "ell must lie in 1..={max}, got {ell}"
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("Krylov starting vector"));
    }
    let beta = norm(y);
    if beta == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(beta)
}

pub(crate) fn reference_norm(op: &dyn LinearOperator, opts: &KrylovOptions) -> f64 {
    spectral_norm_estimate(op, &opts.norm_power)
}
