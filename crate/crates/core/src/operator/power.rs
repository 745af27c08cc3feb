use super::LinearOperator;
use crate::rng::{Stream, POWER_STREAM};
use crate::vector::{norm, scale};

/// Settings of the power iteration on `T^* T`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerConfig {
    pub max_iters: usize,
    pub rel_tol: f64,
    pub seed: u64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self {
            max_iters: 200,
            rel_tol: 1e-10,
            seed: 0x9e37_79b9,
        }
    }
}

/// Estimates `||T||_2` by power iteration on `T^* T`.
///
/// The start vector is Gaussian from the library stream (`POWER_STREAM`,
/// `cfg.seed`). Each step computes `z = T^* T v` for unit `v` and takes
/// `sqrt(||z||)` as the estimate, stopping when two successive estimates agree
/// to `cfg.rel_tol` relatively or after `cfg.max_iters` steps. The estimate
/// never exceeds the true norm up to rounding. The zero operator gives 0.
pub fn spectral_norm_estimate<O: LinearOperator + ?Sized>(op: &O, cfg: &PowerConfig) -> f64 {
    assert!(cfg.max_iters >= 1, "max_iters must be at least 1");
    assert!(cfg.rel_tol > 0.0, "rel_tol must be positive");
    let n = op.n_cols();
    if n == 0 || op.n_rows() == 0 {
        return 0.0;
    }
    let mut v = Stream::new(cfg.seed, POWER_STREAM).normal_vec(n);
    let nv = norm(&v);
    scale(1.0 / nv, &mut v);

    let mut tv = vec![0.0; op.n_rows()];
    let mut z = vec![0.0; n];
    let mut estimate = 0.0;
    for _ in 0..cfg.max_iters {
        op.apply_into(&v, &mut tv);
        op.apply_adjoint_into(&tv, &mut z);
        let nz = norm(&z);
        if nz == 0.0 || !nz.is_finite() {
            // v lies in the kernel of T^*T; the Rayleigh quotient is the best
            // we have.
            return norm(&tv);
        }
        let next = nz.sqrt();
        let converged = (next - estimate).abs() <= cfg.rel_tol * next;
        estimate = next;
        std::mem::swap(&mut v, &mut z);
        scale(1.0 / nz, &mut v);
        if converged {
            break;
        }
    }
    estimate
}
