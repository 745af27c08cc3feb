use super::KrylovDecomposition;
use crate::operator::{spectral_norm_estimate, LinearOperator, PowerConfig};
use crate::vector::{combine, project};

/// Inflation applied to the power-iteration estimate of `||T - T^(l)||`.
pub const H_ELL_SAFETY: f64 = 1.01;

/// `v -> T v - L M V^T v`, the difference between an operator and its
/// Krylov approximation.
pub struct ResidualOperator<'a> {
    pub op: &'a dyn LinearOperator,
    pub decomp: &'a dyn KrylovDecomposition,
}

impl LinearOperator for ResidualOperator<'_> {
    fn n_rows(&self) -> usize {
        self.op.n_rows()
    }
    fn n_cols(&self) -> usize {
        self.op.n_cols()
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        self.op.apply_into(x, out);
        let c = project(self.decomp.right_basis(), x);
        let mc = self.decomp.projected().matvec(&c);
        let lmc = combine(self.decomp.left_basis(), &mc, out.len());
        out.iter_mut().zip(&lmc).for_each(|(o, v)| *o -= v);
    }
    fn apply_adjoint_into(&self, u: &[f64], out: &mut [f64]) {
        self.op.apply_adjoint_into(u, out);
        let c = project(self.decomp.left_basis(), u);
        let mc = self.decomp.projected().matvec_transpose(&c);
        let vmc = combine(self.decomp.right_basis(), &mc, out.len());
        out.iter_mut().zip(&vmc).for_each(|(o, v)| *o -= v);
    }
    fn label(&self) -> String {
        format!("residual of {} at l={}", self.op.label(), self.decomp.ell_eff())
    }
}

/// Upper-bound estimate `h_l` of `||T - T^(l)||_2`.
///
/// Power iteration on the residual operator, inflated by [`H_ELL_SAFETY`].
pub fn estimate_h_ell(op: &dyn LinearOperator, decomp: &dyn KrylovDecomposition, cfg: &PowerConfig) -> f64 {
    let r = ResidualOperator { op, decomp };
    H_ELL_SAFETY * spectral_norm_estimate(&r, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krylov::{golub_kahan_bidiagonalize, KrylovOptions};
    use crate::operator::{adjoint_mismatch, DenseMatrix};

    #[test]
    fn zero_at_full_dimension() {
        let t = DenseMatrix::random(9, 6, 1);
        let y = crate::rng::Stream::new(1, 9).normal_vec(9);
        let d = golub_kahan_bidiagonalize(&t, &y, 6, &KrylovOptions::default()).unwrap();
        assert!(estimate_h_ell(&t, &d, &PowerConfig::default()) < 1e-10 * d.norm_estimate);
    }

    #[test]
    fn residual_operator_is_adjoint_consistent() {
        let t = DenseMatrix::random(9, 6, 2);
        let y = crate::rng::Stream::new(2, 9).normal_vec(9);
        let d = golub_kahan_bidiagonalize(&t, &y, 3, &KrylovOptions::default()).unwrap();
        let r = ResidualOperator { op: &t, decomp: &d };
        assert!(adjoint_mismatch(&r, 20, 3) < 1e-12);
    }
}
