use crate::error::{Error, Result};
use crate::operator::DenseMatrix;
use crate::vector::{axpy, dot, norm, orthogonalize, scale};

/// Relative threshold below which a singular value does not count towards
/// the rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 80;

/// `M = W Σ S^T` with `W` (m x m) and `S` (k x k) orthogonal and
/// `sigmas` sorted in nonincreasing order.
#[derive(Clone, Debug)]
pub struct SmallSvd {
    pub w: DenseMatrix,
    pub s: DenseMatrix,
    /// `min(m, k)` singular values.
    pub sigmas: Vec<f64>,
    /// Number of singular values above `rank_tol * sigma_1`.
    pub rank: usize,
}

impl SmallSvd {
    /// `W Σ S^T` rebuilt densely.
    pub fn reconstruct(&self) -> DenseMatrix {
        let (m, k) = (self.w.rows(), self.s.rows());
        let mut out = DenseMatrix::zeros(m, k);
        for (j, sj) in self.sigmas.iter().enumerate() {
            for r in 0..m {
                let wr = self.w[(r, j)] * sj;
                if wr == 0.0 {
                    continue;
                }
                for c in 0..k {
                    out[(r, c)] += wr * self.s[(c, j)];
                }
            }
        }
        out
    }

    /// Column `j` of `S`.
    pub fn right_vector(&self, j: usize) -> Vec<f64> {
        self.s.column(j)
    }
}

/// SVD of a small dense matrix by one-sided (Hestenes) Jacobi.
///
/// Column pairs are rotated until every pair is orthogonal to working
/// precision relative to the product of the column norms. Wide matrices are
/// handled through their transpose.
pub fn svd_small(m: &DenseMatrix, rank_tol: f64) -> Result<SmallSvd> {
    if !(rank_tol > 0.0 && rank_tol < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "rank_tol must lie in (0, 1), got {rank_tol}"
        )));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("svd_small input"));
    }
    if m.rows() < m.cols() {
        let t = svd_small(&m.transpose(), rank_tol)?;
        return Ok(SmallSvd {
            w: t.s,
            s: t.w,
            sigmas: t.sigmas,
            rank: t.rank,
        });
    }
    let (rows, cols) = (m.rows(), m.cols());

    // Column-major working copies of M and of the accumulated rotations.
    let mut a: Vec<Vec<f64>> = (0..cols).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            let mut e = vec![0.0; cols];
            e[j] = 1.0;
            e
        })
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = dot(&a[p], &a[p]);
                let beta = dot(&a[q], &a[q]);
                let gamma = dot(&a[p], &a[q]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut a, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = a.iter().map(|c| norm(c)).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));

    let sigmas: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let sigma1 = sigmas.first().copied().unwrap_or(0.0);
    let rank = sigmas
        .iter()
        .take_while(|&&s| s > rank_tol * sigma1 && s > 0.0)
        .count();

    let mut s_mat = DenseMatrix::zeros(cols, cols);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..cols {
            s_mat[(r, dst)] = v[src][r];
        }
    }

    let mut w_cols: Vec<Vec<f64>> = Vec::with_capacity(rows);
    let mut pending = Vec::new();
    for (pos, &src) in order.iter().enumerate() {
        let nrm = norms[src];
        if nrm > f64::MIN_POSITIVE * 1e8 {
            let mut c = a[src].clone();
            scale(1.0 / nrm, &mut c);
            orthogonalize(&mut c, &w_cols);
            let nc = norm(&c);
            if nc > 0.5 {
                scale(1.0 / nc, &mut c);
                w_cols.push(c);
                continue;
            }
        }
        pending.push(pos);
        w_cols.push(vec![0.0; rows]);
    }
    // Fill missing columns (zero singular values) and extend to a square W.
    for pos in pending {
        let others: Vec<Vec<f64>> = w_cols
            .iter()
            .enumerate()
            .filter(|(k, c)| *k != pos && norm(c) > 0.0)
            .map(|(_, c)| c.clone())
            .collect();
        w_cols[pos] = complement_vector(&others, rows);
    }
    while w_cols.len() < rows {
        let c = complement_vector(&w_cols, rows);
        w_cols.push(c);
    }
    let w = DenseMatrix::from_columns(rows, &w_cols);

    Ok(SmallSvd {
        w,
        s: s_mat,
        sigmas,
        rank,
    })
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// A unit vector orthogonal to `basis`, built from the canonical vector with
/// the largest residual after projection.
fn complement_vector(basis: &[Vec<f64>], len: usize) -> Vec<f64> {
    let mut best = 0;
    let mut best_res = -1.0;
    for e in 0..len {
        let proj: f64 = basis.iter().map(|b| b[e] * b[e]).sum();
        let res = 1.0 - proj;
        if res > best_res {
            best_res = res;
            best = e;
        }
    }
    let mut c = vec![0.0; len];
    c[best] = 1.0;
    orthogonalize(&mut c, basis);
    let nc = norm(&c);
    scale(1.0 / nc, &mut c);
    // One more pass for vectors that started nearly inside the span.
    let coeffs: Vec<f64> = basis.iter().map(|b| dot(b, &c)).collect();
    for (b, k) in basis.iter().zip(&coeffs) {
        axpy(-k, b, &mut c);
    }
    let nc = norm(&c);
    scale(1.0 / nc, &mut c);
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orth_err(q: &DenseMatrix) -> f64 {
        q.transpose()
            .matmul(q)
            .unwrap()
            .max_abs_diff(&DenseMatrix::identity(q.cols()))
    }

    fn check(m: &DenseMatrix) -> SmallSvd {
        let svd = svd_small(m, DEFAULT_RANK_TOL).unwrap();
        assert!(orth_err(&svd.w) <= 1e-13, "W {}", orth_err(&svd.w));
        assert!(orth_err(&svd.s) <= 1e-13, "S {}", orth_err(&svd.s));
        let s1 = svd.sigmas[0];
        assert!(svd.reconstruct().max_abs_diff(m) <= 1e-12 * s1.max(f64::MIN_POSITIVE));
        assert!(svd.sigmas.windows(2).all(|p| p[0] >= p[1]));
        svd
    }

    #[test]
    fn diagonal() {
        let svd = check(&DenseMatrix::diagonal(&[3.0, 1.0]));
        assert_eq!(svd.sigmas, vec![3.0, 1.0]);
        for j in 0..2 {
            assert_eq!(svd.w[(j, j)].abs(), 1.0);
            assert_eq!(svd.s[(j, j)].abs(), 1.0);
        }
    }

    #[test]
    fn permutation() {
        let m = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let svd = check(&m);
        assert_eq!(svd.sigmas, vec![1.0, 1.0]);
        assert_eq!(svd.rank, 2);
    }

    #[test]
    fn tall_wide_and_rank_deficient() {
        check(&DenseMatrix::random(9, 8, 3));
        check(&DenseMatrix::random(3, 7, 4));
        let mut m = DenseMatrix::random(6, 4, 5);
        for r in 0..6 {
            m[(r, 3)] = m[(r, 0)] - 2.0 * m[(r, 1)];
        }
        let svd = check(&m);
        assert_eq!(svd.rank, 3);
        let z = check(&DenseMatrix::zeros(3, 2));
        assert_eq!(z.rank, 0);
    }

    #[test]
    fn rejects_non_finite_and_bad_tol() {
        let mut m = DenseMatrix::identity(2);
        m[(0, 1)] = f64::NAN;
        assert!(svd_small(&m, 1e-12).is_err());
        assert!(svd_small(&DenseMatrix::identity(2), 0.0).is_err());
    }

    #[test]
    fn graded_bidiagonal_keeps_small_values() {
        let mut b = DenseMatrix::zeros(7, 6);
        for j in 0..6 {
            b[(j, j)] = 10f64.powi(-(2 * j as i32));
            b[(j + 1, j)] = 0.5 * 10f64.powi(-(2 * j as i32));
        }
        let svd = check(&b);
        assert_eq!(svd.rank, 6);
        assert!(svd.sigmas[5] > 1e-11);
    }
}
