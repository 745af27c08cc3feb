use super::{reference_norm, validate, Breakdown, KrylovDecomposition, KrylovOptions, Reorthogonalization};
use crate::error::{Error, Result};
use crate::operator::{DenseMatrix, LinearOperator};
use crate::vector::{axpy, norm, orthogonalize, scale};

/// Partial Golub-Kahan bidiagonalization `T V = U B`, `T^T U_l = V B_l^T`.
#[derive(Clone, Debug)]
pub struct BidiagDecomposition {
    /// Diagonal of `B`, one per right vector.
    pub alphas: Vec<f64>,
    /// `beta_1 = ||y||` followed by the subdiagonal of `B`. After a terminal
    /// breakdown the last entry is the vanished coefficient, stored as 0.
    pub betas: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub b: DenseMatrix,
    pub ell_requested: usize,
    pub breakdown: Option<Breakdown>,
    pub norm_estimate: f64,
}

impl BidiagDecomposition {
    /// The decomposition after its first `ell` steps.
    ///
    /// With full reorthogonalization this equals running the process with
    /// `ell` directly.
    pub fn truncated(&self, ell: usize) -> Result<Self> {
        let ell_eff = self.v.len();
        if ell == 0 || ell > ell_eff {
            return Err(Error::InvalidArgument(format!(
                "cannot truncate a decomposition of dimension {ell_eff} to {ell}"
            )));
        }
        if ell == ell_eff {
            let mut out = self.clone();
            out.ell_requested = ell;
            return Ok(out);
        }
        let alphas = self.alphas[..ell].to_vec();
        let betas = self.betas[..ell + 1].to_vec();
        Ok(Self {
            b: bidiagonal(&alphas, &betas, true),
            alphas,
            betas,
            u: self.u[..ell + 1].to_vec(),
            v: self.v[..ell].to_vec(),
            ell_requested: ell,
            breakdown: None,
            norm_estimate: self.norm_estimate,
        })
    }

    /// `beta_1 = ||y||`.
    pub fn beta1(&self) -> f64 {
        self.betas[0]
    }
}

fn bidiagonal(alphas: &[f64], betas: &[f64], extra_row: bool) -> DenseMatrix {
    let k = alphas.len();
    let rows = if extra_row { k + 1 } else { k };
    let mut b = DenseMatrix::zeros(rows, k);
    for j in 0..k {
        b[(j, j)] = alphas[j];
        if j + 1 < rows {
            b[(j + 1, j)] = betas[j + 1];
        }
    }
    b
}

impl KrylovDecomposition for BidiagDecomposition {
    fn projected(&self) -> &DenseMatrix {
        &self.b
    }
    fn left_basis(&self) -> &[Vec<f64>] {
        &self.u
    }
    fn right_basis(&self) -> &[Vec<f64>] {
        &self.v
    }
    fn ell_requested(&self) -> usize {
        self.ell_requested
    }
    fn breakdown(&self) -> Option<Breakdown> {
        self.breakdown
    }
    fn norm_estimate(&self) -> f64 {
        self.norm_estimate
    }
}

/// Runs `ell` steps of Golub-Kahan bidiagonalization started from `y`.
///
/// Each step computes `w = T^T u_k - beta_k v_{k-1}`, `alpha_k = ||w||`,
/// `v_k = w / alpha_k`, then `w = T v_k - alpha_k u_k`,
/// `beta_{k+1} = ||w||`, `u_{k+1} = w / beta_{k+1}`. With
/// [`Reorthogonalization::Full`] each new vector is also orthogonalized
/// against all earlier ones.
///
/// If `alpha_k` vanishes (relative to `||T||`) the run stops with `k - 1`
/// right vectors. If `beta_{k+1}` vanishes the run stops with `k` vectors on
/// both sides and a square `B`.
pub fn golub_kahan_bidiagonalize(
    op: &dyn LinearOperator,
    y: &[f64],
    ell: usize,
    opts: &KrylovOptions,
) -> Result<BidiagDecomposition> {
    let beta1 = validate(op, y, ell)?;
    let full = opts.reorth == Reorthogonalization::Full;
    let mut t_norm = reference_norm(op, opts);

    let mut u0 = y.to_vec();
    scale(1.0 / beta1, &mut u0);
    let mut u = vec![u0];
    let mut v: Vec<Vec<f64>> = Vec::with_capacity(ell);
    let mut alphas = Vec::with_capacity(ell);
    let mut betas = vec![beta1];
    let mut breakdown = None;
    let mut extra_row = true;

    let mut w_right = vec![0.0; op.n_cols()];
    let mut w_left = vec![0.0; op.n_rows()];
    for k in 1..=ell {
        op.apply_adjoint_into(&u[k - 1], &mut w_right);
        if k > 1 {
            axpy(-betas[k - 1], &v[k - 2], &mut w_right);
        }
        if full {
            orthogonalize(&mut w_right, &v);
        }
        let alpha = norm(&w_right);
        if alpha <= opts.breakdown_tol * t_norm || !alpha.is_finite() {
            if k == 1 {
                return Err(Error::TrivialKrylovSpace);
            }
            breakdown = Some(Breakdown {
                step: k,
                value: alpha,
            });
            // u_k stays: T V_{k-1} = U_k B_{k,k-1} still holds.
            break;
        }
        scale(1.0 / alpha, &mut w_right);
        v.push(w_right.clone());
        alphas.push(alpha);

        op.apply_into(&v[k - 1], &mut w_left);
        axpy(-alpha, &u[k - 1], &mut w_left);
        if full {
            orthogonalize(&mut w_left, &u);
        }
        let beta = norm(&w_left);
        t_norm = t_norm.max((alpha * alpha + beta * beta).sqrt());
        if beta <= opts.breakdown_tol * t_norm || !beta.is_finite() {
            breakdown = Some(Breakdown { step: k, value: beta });
            betas.push(0.0);
            extra_row = false;
            break;
        }
        scale(1.0 / beta, &mut w_left);
        u.push(w_left.clone());
        betas.push(beta);
    }

    Ok(BidiagDecomposition {
        b: bidiagonal(&alphas, &betas, extra_row),
        alphas,
        betas,
        u,
        v,
        ell_requested: ell,
        breakdown,
        norm_estimate: t_norm,
    })
}
