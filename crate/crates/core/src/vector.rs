//! Dense vector kernels.
//!
//! Every reduction runs sequentially from index 0 upward so results are
//! bit-reproducible for identical inputs.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc + x * y)
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(alpha: f64, x: &mut [f64]) {
    for xi in x.iter_mut() {
        *xi *= alpha;
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `||reference - approx|| / ||reference||`, or the absolute error when the
/// reference vanishes.
pub fn relative_error(reference: &[f64], approx: &[f64]) -> f64 {
    let diff = norm(&sub(reference, approx));
    let base = norm(reference);
    if base > 0.0 {
        diff / base
    } else {
        diff
    }
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Two passes of classical Gram-Schmidt of `w` against orthonormal `basis`.
///
/// Returns the coefficients accumulated over both passes.
pub fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut coeffs = vec![0.0; basis.len()];
    for _ in 0..2 {
        let pass: Vec<f64> = basis.iter().map(|b| dot(b, w)).collect();
        for (b, c) in basis.iter().zip(&pass) {
            axpy(-c, b, w);
        }
        for (acc, c) in coeffs.iter_mut().zip(&pass) {
            *acc += c;
        }
    }
    coeffs
}

/// `sum_j coeffs[j] * columns[j]`, for a basis stored as columns.
pub fn combine(columns: &[Vec<f64>], coeffs: &[f64], len: usize) -> Vec<f64> {
    debug_assert_eq!(columns.len(), coeffs.len());
    let mut out = vec![0.0; len];
    for (col, c) in columns.iter().zip(coeffs) {
        axpy(*c, col, &mut out);
    }
    out
}

/// Inner products `columns[j] . v`.
pub fn project(columns: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    columns.iter().map(|c| dot(c, v)).collect()
}
