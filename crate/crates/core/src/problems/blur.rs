use super::Boundary;
use crate::error::{Error, Result};
use crate::operator::LinearOperator;

/// Banded 1D convolution `(T x)_i = sum_d k_d x_{i + d}` for offsets
/// `d` in `[-left, right]`, with out-of-range indices handled by `boundary`.
#[derive(Clone, Debug)]
pub struct Convolution1d {
    n: usize,
    /// Taps for offsets `-left ..= right`.
    taps: Vec<f64>,
    left: usize,
    boundary: Boundary,
    name: String,
}

impl Convolution1d {
    pub fn new(
        n: usize,
        taps: Vec<f64>,
        left: usize,
        boundary: Boundary,
        name: impl Into<String>,
    ) -> Result<Self> {
        if n == 0 || taps.is_empty() || left >= taps.len() {
            return Err(Error::InvalidArgument(format!(
                "convolution needs n >= 1 and a tap at offset 0 (n={n}, taps={}, left={left})",
                taps.len()
            )));
        }
        Ok(Self {
            n,
            taps,
            left,
            boundary,
            name: name.into(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Index that offset position `j` (possibly outside `0..n`) maps to.
    #[inline]
    fn source(&self, j: isize) -> Option<usize> {
        let n = self.n as isize;
        if (0..n).contains(&j) {
            return Some(j as usize);
        }
        match self.boundary {
            Boundary::Zero => None,
            Boundary::Reflexive => {
                let m = j.rem_euclid(2 * n);
                Some(if m < n { m } else { 2 * n - 1 - m } as usize)
            }
        }
    }

    fn conv_into(&self, x: &[f64], out: &mut [f64], adjoint: bool) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let left = self.left as isize;
        for i in 0..self.n {
            for (t, k) in self.taps.iter().enumerate() {
                let j = i as isize + t as isize - left;
                if let Some(j) = self.source(j) {
                    if adjoint {
                        out[j] += k * x[i];
                    } else {
                        out[i] += k * x[j];
                    }
                }
            }
        }
    }
}

impl LinearOperator for Convolution1d {
    fn n_rows(&self) -> usize {
        self.n
    }
    fn n_cols(&self) -> usize {
        self.n
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        self.conv_into(x, out, false);
    }
    fn apply_adjoint_into(&self, u: &[f64], out: &mut [f64]) {
        self.conv_into(u, out, true);
    }
    fn label(&self) -> String {
        self.name.clone()
    }
}

/// Normalized Gaussian taps `exp(-d^2 / (2 gamma^2))` for `|d| <= ceil(4 gamma)`.
pub fn gaussian_taps(gamma: f64) -> Vec<f64> {
    let r = (4.0 * gamma).ceil() as isize;
    let mut taps: Vec<f64> = (-r..=r)
        .map(|d| (-((d * d) as f64) / (2.0 * gamma * gamma)).exp())
        .collect();
    let s: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= s);
    taps
}

/// Symmetric Toeplitz Gaussian blur on `R^n`.
///
/// Taps sum to one; under the reflexive boundary every row sums to one.
pub fn gaussian_blur_1d(n: usize, gamma: f64, boundary: Boundary) -> Result<Convolution1d> {
    if n < 2 || !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "gaussian blur needs n >= 2 and gamma > 0 (n={n}, gamma={gamma})"
        )));
    }
    let taps = gaussian_taps(gamma);
    let left = taps.len() / 2;
    Convolution1d::new(
        n,
        taps,
        left,
        boundary,
        format!("gaussian_blur_1d(n={n}, gamma={gamma}, {boundary})"),
    )
}

/// Causal box blur of length `len`: `(T x)_i = (x_i + ... + x_{i+len-1}) / len`.
pub fn motion_taps(len: usize) -> Vec<f64> {
    vec![1.0 / len as f64; len]
}

/// `X -> C X R^T` on an `rows x cols` image stored row-major: `col_op`
/// blurs along each column, `row_op` along each row.
#[derive(Clone, Debug)]
pub struct Separable2d {
    pub col_op: Convolution1d,
    pub row_op: Convolution1d,
    name: String,
}

impl Separable2d {
    pub fn new(col_op: Convolution1d, row_op: Convolution1d, name: impl Into<String>) -> Self {
        Self {
            col_op,
            row_op,
            name: name.into(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.col_op.n(), self.row_op.n())
    }

    fn apply_impl(&self, x: &[f64], out: &mut [f64], adjoint: bool) {
        let (rows, cols) = self.shape();
        let mut tmp = vec![0.0; rows * cols];
        let mut buf_in = vec![0.0; rows.max(cols)];
        let mut buf_out = vec![0.0; rows.max(cols)];
        // along rows
        for r in 0..rows {
            let src = &x[r * cols..(r + 1) * cols];
            let dst = &mut tmp[r * cols..(r + 1) * cols];
            self.row_op.conv_into(src, dst, adjoint);
        }
        // along columns
        for c in 0..cols {
            for r in 0..rows {
                buf_in[r] = tmp[r * cols + c];
            }
            self.col_op
                .conv_into(&buf_in[..rows], &mut buf_out[..rows], adjoint);
            for r in 0..rows {
                out[r * cols + c] = buf_out[r];
            }
        }
    }
}

impl LinearOperator for Separable2d {
    fn n_rows(&self) -> usize {
        let (r, c) = self.shape();
        r * c
    }
    fn n_cols(&self) -> usize {
        self.n_rows()
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        self.apply_impl(x, out, false);
    }
    fn apply_adjoint_into(&self, u: &[f64], out: &mut [f64]) {
        self.apply_impl(u, out, true);
    }
    fn label(&self) -> String {
        self.name.clone()
    }
}

/// Gaussian blur of an `n x n` image, the same 1D blur along both axes.
pub fn gaussian_blur_2d(n: usize, gamma: f64, boundary: Boundary) -> Result<Separable2d> {
    let t = gaussian_blur_1d(n, gamma, boundary)?;
    Ok(Separable2d::new(
        t.clone(),
        t,
        format!("gaussian_blur_2d(n={n}, gamma={gamma}, {boundary})"),
    ))
}

/// Nonsymmetric blur of an `n x n` image: a causal box of `len` pixels along
/// each row and a Gaussian of width `gamma` along each column, zero boundary.
pub fn motion_blur_2d(n: usize, len: usize, gamma: f64) -> Result<Separable2d> {
    if len == 0 || len > n {
        return Err(Error::InvalidArgument(format!(
            "motion length must lie in 1..={n}, got {len}"
        )));
    }
    let col = gaussian_blur_1d(n, gamma, Boundary::Zero)?;
    let row = Convolution1d::new(n, motion_taps(len), 0, Boundary::Zero, "motion")?;
    Ok(Separable2d::new(
        col,
        row,
        format!("motion_blur_2d(n={n}, len={len}, gamma={gamma})"),
    ))
}
