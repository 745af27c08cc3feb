use crate::error::{check_len, Result};
use crate::krylov::{estimate_h_ell, KrylovDecomposition};
use crate::linalg::{svd_small, DEFAULT_RANK_TOL};
use crate::operator::{spectral_norm_estimate, LinearOperator, PowerConfig};
use crate::vector::{axpy, combine, norm, project};

/// Quantities that measure how well a Krylov approximation captures an
/// operator at dimension `ell`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticReport {
    pub ell: usize,
    /// `||R (T - T^(l)) x|| / ||R T x||` with `R` the projector onto the
    /// range of the approximation.
    pub assumption_gap: f64,
    /// Estimate of `||(I - R) T||`.
    pub gamma_ell: f64,
    /// `h_l / ||T||`.
    pub h_ell_rel: f64,
    pub h_ell: f64,
    pub op_norm: f64,
}

/// Orthogonal projector `R = Q Q^T` onto the range of `L M`, with `Q` the
/// left basis rotated by the leading `rank` left singular vectors of `M`.
pub struct RangeProjector {
    pub q: Vec<Vec<f64>>,
}

impl RangeProjector {
    pub fn new(decomp: &dyn KrylovDecomposition) -> Result<Self> {
        let svd = svd_small(decomp.projected(), DEFAULT_RANK_TOL)?;
        let len = decomp.left_basis().first().map_or(0, Vec::len);
        let q = (0..svd.rank)
            .map(|j| combine(decomp.left_basis(), &svd.w.column(j), len))
            .collect();
        Ok(Self { q })
    }

    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        combine(&self.q, &project(&self.q, y), y.len())
    }

    /// `y - R y`.
    pub fn complement(&self, y: &[f64]) -> Vec<f64> {
        let mut out = y.to_vec();
        let c = project(&self.q, y);
        for (qj, cj) in self.q.iter().zip(&c) {
            axpy(-cj, qj, &mut out);
        }
        out
    }
}

struct ComplementOperator<'a> {
    op: &'a dyn LinearOperator,
    r: &'a RangeProjector,
}

impl LinearOperator for ComplementOperator<'_> {
    fn n_rows(&self) -> usize {
        self.op.n_rows()
    }
    fn n_cols(&self) -> usize {
        self.op.n_cols()
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let mut tx = vec![0.0; out.len()];
        self.op.apply_into(x, &mut tx);
        out.copy_from_slice(&self.r.complement(&tx));
    }
    fn apply_adjoint_into(&self, u: &[f64], out: &mut [f64]) {
        self.op.apply_adjoint_into(&self.r.complement(u), out);
    }
}

/// Evaluates the approximation diagnostics for `decomp` built from `op`.
///
/// The gap uses `(R T - T^(l)) x = R T (I - V V^T) x`.
pub fn assumption_diagnostics(
    op: &dyn LinearOperator,
    decomp: &dyn KrylovDecomposition,
    x_dagger: &[f64],
    power: &PowerConfig,
) -> Result<DiagnosticReport> {
    check_len("assumption_diagnostics", op.n_cols(), x_dagger.len())?;
    let r = RangeProjector::new(decomp)?;

    let v = decomp.right_basis();
    let mut x_perp = x_dagger.to_vec();
    let c = project(v, x_dagger);
    for (vj, cj) in v.iter().zip(&c) {
        axpy(-cj, vj, &mut x_perp);
    }
    let num = norm(&project(&r.q, &op.apply(&x_perp)?));
    let den = norm(&project(&r.q, &op.apply(x_dagger)?));
    let assumption_gap = if num == 0.0 { 0.0 } else { num / den };

    let gamma_ell = spectral_norm_estimate(&ComplementOperator { op, r: &r }, power);
    let h_ell = estimate_h_ell(op, decomp, power);
    let op_norm = spectral_norm_estimate(op, power);
    Ok(DiagnosticReport {
        ell: decomp.ell_eff(),
        assumption_gap,
        gamma_ell,
        h_ell_rel: if op_norm > 0.0 { h_ell / op_norm } else { 0.0 },
        h_ell,
        op_norm,
    })
}
