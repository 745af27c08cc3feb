//! Matrix-free linear operators.

mod dense;
mod power;

pub use dense::DenseMatrix;
pub use power::{spectral_norm_estimate, PowerConfig};

use std::sync::Arc;

use crate::error::{check_len, Result};
use crate::rng::Stream;
use crate::vector::{dot, norm};

/// A real linear map `T: R^n_cols -> R^n_rows` with access to its adjoint.
///
/// Implementations must be deterministic and must overwrite (not accumulate
/// into) the output buffer. The `*_into` methods may assume correctly sized
/// buffers; the checked [`apply`](LinearOperator::apply) and
/// [`apply_adjoint`](LinearOperator::apply_adjoint) wrappers validate lengths.
pub trait LinearOperator: Send + Sync {
    fn n_rows(&self) -> usize;
    fn n_cols(&self) -> usize;

    fn apply_into(&self, x: &[f64], out: &mut [f64]);
    fn apply_adjoint_into(&self, u: &[f64], out: &mut [f64]);

    fn label(&self) -> String {
        format!("operator {}x{}", self.n_rows(), self.n_cols())
    }

    fn is_square(&self) -> bool {
        self.n_rows() == self.n_cols()
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("apply", self.n_cols(), x.len())?;
        let mut out = vec![0.0; self.n_rows()];
        self.apply_into(x, &mut out);
        Ok(out)
    }

    fn apply_adjoint(&self, u: &[f64]) -> Result<Vec<f64>> {
        check_len("apply_adjoint", self.n_rows(), u.len())?;
        let mut out = vec![0.0; self.n_cols()];
        self.apply_adjoint_into(u, &mut out);
        Ok(out)
    }
}

macro_rules! forward_operator {
    ($($ty:ty),*) => {$(
        impl<T: LinearOperator + ?Sized> LinearOperator for $ty {
            fn n_rows(&self) -> usize { (**self).n_rows() }
            fn n_cols(&self) -> usize { (**self).n_cols() }
            fn apply_into(&self, x: &[f64], out: &mut [f64]) { (**self).apply_into(x, out) }
            fn apply_adjoint_into(&self, u: &[f64], out: &mut [f64]) {
                (**self).apply_adjoint_into(u, out)
            }
            fn label(&self) -> String { (**self).label() }
        }
    )*};
}

forward_operator!(&T, Box<T>, Arc<T>);

/// The identity on `R^n`.
#[derive(Clone, Copy, Debug)]
pub struct Identity {
    pub n: usize,
}

impl LinearOperator for Identity {
    fn n_rows(&self) -> usize {
        self.n
    }
    fn n_cols(&self) -> usize {
        self.n
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
    }
    fn apply_adjoint_into(&self, u: &[f64], out: &mut [f64]) {
        out.copy_from_slice(u);
    }
    fn label(&self) -> String {
        format!("identity({})", self.n)
    }
}

/// `factor * inner`.
#[derive(Clone, Debug)]
pub struct Scaled<O> {
    pub factor: f64,
    pub inner: O,
}

impl<O: LinearOperator> LinearOperator for Scaled<O> {
    fn n_rows(&self) -> usize {
        self.inner.n_rows()
    }
    fn n_cols(&self) -> usize {
        self.inner.n_cols()
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        self.inner.apply_into(x, out);
        out.iter_mut().for_each(|v| *v *= self.factor);
    }
    fn apply_adjoint_into(&self, u: &[f64], out: &mut [f64]) {
        self.inner.apply_adjoint_into(u, out);
        out.iter_mut().for_each(|v| *v *= self.factor);
    }
    fn label(&self) -> String {
        format!("{} * {}", self.factor, self.inner.label())
    }
}

/// Materialises `op` by probing it with every canonical basis vector.
pub fn to_dense<O: LinearOperator + ?Sized>(op: &O) -> DenseMatrix {
    let (m, n) = (op.n_rows(), op.n_cols());
    let mut out = DenseMatrix::zeros(m, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; m];
    for j in 0..n {
        e[j] = 1.0;
        op.apply_into(&e, &mut col);
        for (i, v) in col.iter().enumerate() {
            out[(i, j)] = *v;
        }
        e[j] = 0.0;
    }
    out
}

/// Largest relative violation of `<T x, y> = <x, T^* y>` over `probes`
/// Gaussian pairs drawn from `seed`.
///
/// Each discrepancy is scaled by `||T x|| ||y|| + ||x|| ||T^* y||`.
pub fn adjoint_mismatch<O: LinearOperator + ?Sized>(op: &O, probes: usize, seed: u64) -> f64 {
    let mut rng = Stream::new(seed, crate::rng::MATRIX_STREAM);
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let x = rng.normal_vec(op.n_cols());
        let y = rng.normal_vec(op.n_rows());
        let tx = op.apply(&x).expect("sized probe");
        let ty = op.apply_adjoint(&y).expect("sized probe");
        let scale = norm(&tx) * norm(&y) + norm(&x) * norm(&ty);
        if scale > 0.0 {
            worst = worst.max((dot(&tx, &y) - dot(&x, &ty)).abs() / scale);
        }
    }
    worst
}
