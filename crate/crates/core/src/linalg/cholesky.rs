use crate::error::{check_len, Error, Result};
use crate::operator::DenseMatrix;

/// Cholesky factor of `B^T B + alpha I`, computed once per `alpha` and
/// reused for every right-hand side.
#[derive(Clone, Debug)]
pub enum ShiftedNormalFactor {
    /// `B` lower bidiagonal: `L` is lower bidiagonal with diagonal `diag` and
    /// subdiagonal `sub`.
    Tridiagonal { diag: Vec<f64>, sub: Vec<f64> },
    /// General `B`: dense lower-triangular `L`, row-major.
    Dense { l: DenseMatrix },
}

impl ShiftedNormalFactor {
    pub fn new(b: &DenseMatrix, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if b.is_lower_bidiagonal() {
            Self::tridiagonal(b, alpha)
        } else {
            Self::from_gram(&b.gram(), alpha)
        }
    }

    /// Factors `G + alpha I` for a symmetric positive semidefinite `G`.
    pub fn from_gram(g: &DenseMatrix, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let n = g.rows();
        if g.cols() != n {
            return Err(Error::NonSquare {
                context: "ShiftedNormalFactor::from_gram",
                rows: n,
                cols: g.cols(),
            });
        }
        let mut l = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = g[(j, j)] + alpha;
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite { index: j, pivot: d });
            }
            let d = d.sqrt();
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = g[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(Self::Dense { l })
    }

    fn tridiagonal(b: &DenseMatrix, alpha: f64) -> Result<Self> {
        let (m, n) = (b.rows(), b.cols());
        let at = |i: usize, j: usize| if i < m { b[(i, j)] } else { 0.0 };
        let mut diag = Vec::with_capacity(n);
        let mut sub = Vec::with_capacity(n.saturating_sub(1));
        for j in 0..n {
            // (B^T B)_{jj} = B_{jj}^2 + B_{j+1,j}^2 ; (B^T B)_{j+1,j} = B_{j+1,j} B_{j+1,j+1}
            let mut d = at(j, j) * at(j, j) + at(j + 1, j) * at(j + 1, j) + alpha;
            if j > 0 {
                let s: f64 = sub[j - 1];
                d -= s * s;
            }
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite { index: j, pivot: d });
            }
            let d = d.sqrt();
            diag.push(d);
            if j + 1 < n {
                sub.push(at(j + 1, j) * at(j + 1, j + 1) / d);
            }
        }
        Ok(Self::Tridiagonal { diag, sub })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Tridiagonal { diag, .. } => diag.len(),
            Self::Dense { l } => l.rows(),
        }
    }

    /// Solves `(B^T B + alpha I) z = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        check_len("ShiftedNormalFactor::solve", self.dim(), rhs.len())?;
        let mut z = rhs.to_vec();
        self.solve_in_place(&mut z);
        Ok(z)
    }

    pub(crate) fn solve_in_place(&self, z: &mut [f64]) {
        match self {
            Self::Tridiagonal { diag, sub } => {
                let n = diag.len();
                for j in 0..n {
                    if j > 0 {
                        z[j] -= sub[j - 1] * z[j - 1];
                    }
                    z[j] /= diag[j];
                }
                for j in (0..n).rev() {
                    if j + 1 < n {
                        z[j] -= sub[j] * z[j + 1];
                    }
                    z[j] /= diag[j];
                }
            }
            Self::Dense { l } => {
                let n = l.rows();
                for i in 0..n {
                    let mut s = z[i];
                    for k in 0..i {
                        s -= l[(i, k)] * z[k];
                    }
                    z[i] = s / l[(i, i)];
                }
                for i in (0..n).rev() {
                    let mut s = z[i];
                    for k in i + 1..n {
                        s -= l[(k, i)] * z[k];
                    }
                    z[i] = s / l[(i, i)];
                }
            }
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "alpha must be positive and finite, got {alpha}"
        )))
    }
}

/// Solves `(B^T B + alpha I) z = b`.
pub fn solve_shifted_normal(b: &DenseMatrix, alpha: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    check_len("solve_shifted_normal", b.cols(), rhs.len())?;
    ShiftedNormalFactor::new(b, alpha)?.solve(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_case() {
        let b = DenseMatrix::from_rows(&[vec![1.0], vec![0.0]]).unwrap();
        let z = solve_shifted_normal(&b, 1.0, &[1.0]).unwrap();
        assert!((z[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn scaled_identity() {
        let z = solve_shifted_normal(&DenseMatrix::identity(3), 3.0, &[4.0, 8.0, 12.0]).unwrap();
        for (a, b) in z.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_nonpositive_alpha() {
        let b = DenseMatrix::identity(2);
        assert!(solve_shifted_normal(&b, 0.0, &[1.0, 1.0]).is_err());
        assert!(solve_shifted_normal(&b, -1.0, &[1.0, 1.0]).is_err());
        assert!(solve_shifted_normal(&b, 1.0, &[1.0]).is_err());
    }

    #[test]
    fn tridiagonal_and_dense_paths_agree() {
        let mut b = DenseMatrix::zeros(7, 6);
        for j in 0..6 {
            b[(j, j)] = 1.0 + j as f64 * 0.3;
            b[(j + 1, j)] = 0.7 - j as f64 * 0.1;
        }
        let rhs: Vec<f64> = (0..6).map(|j| (j as f64).sin() + 0.5).collect();
        let fast = ShiftedNormalFactor::new(&b, 0.3).unwrap();
        assert!(matches!(fast, ShiftedNormalFactor::Tridiagonal { .. }));
        let slow = ShiftedNormalFactor::from_gram(&b.gram(), 0.3).unwrap();
        let (x, y) = (fast.solve(&rhs).unwrap(), slow.solve(&rhs).unwrap());
        assert!(crate::vector::relative_error(&y, &x) < 1e-14);
    }

    #[test]
    fn square_bidiagonal_after_breakdown() {
        let b = DenseMatrix::from_rows(&[vec![2.0, 0.0], vec![1.0, 3.0]]).unwrap();
        let z = solve_shifted_normal(&b, 0.5, &[1.0, -1.0]).unwrap();
        let g = b.gram();
        let r: Vec<f64> = (0..2)
            .map(|i| g[(i, 0)] * z[0] + g[(i, 1)] * z[1] + 0.5 * z[i])
            .collect();
        assert!((r[0] - 1.0).abs() < 1e-14 && (r[1] + 1.0).abs() < 1e-14);
    }
}
