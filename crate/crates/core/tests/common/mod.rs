#![allow(dead_code)]

use igkt::rng::Stream;
use igkt::{DenseMatrix, KrylovDecomposition};
use nalgebra::{DMatrix, DVector};

pub fn to_na(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

pub fn from_na(m: &DMatrix<f64>) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out[(i, j)] = m[(i, j)];
        }
    }
    out
}

pub fn vec_na(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

pub fn columns_na(cols: &[Vec<f64>]) -> DMatrix<f64> {
    let rows = cols.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

pub fn rel(a: &[f64], b: &[f64]) -> f64 {
    igkt::vector::relative_error(a, b)
}

pub fn gaussian(seed: u64, len: usize) -> Vec<f64> {
    Stream::new(seed, 17).normal_vec(len)
}

/// Random lower-bidiagonal `(k+1) x k` matrix with entries in (0.1, 2).
pub fn random_bidiagonal(k: usize, seed: u64) -> DenseMatrix {
    let mut rng = Stream::new(seed, 18);
    let mut b = DenseMatrix::zeros(k + 1, k);
    for j in 0..k {
        b[(j, j)] = rng.uniform_range(0.1, 2.0);
        b[(j + 1, j)] = rng.uniform_range(0.1, 2.0);
    }
    b
}

/// `max |L^T L - I|` and `max |T V - L M|`.
pub fn decomposition_errors(t: &DenseMatrix, d: &dyn KrylovDecomposition) -> (f64, f64, f64) {
    let l = columns_na(d.left_basis());
    let v = columns_na(d.right_basis());
    let il = DMatrix::identity(l.ncols(), l.ncols());
    let iv = DMatrix::identity(v.ncols(), v.ncols());
    let orth_l = (l.transpose() * &l - il).amax();
    let orth_v = (v.transpose() * &v - iv).amax();
    let rel = (to_na(t) * &v - &l * to_na(d.projected())).amax();
    (orth_l, orth_v, rel)
}
