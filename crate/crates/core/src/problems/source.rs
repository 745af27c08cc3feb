use crate::error::{Error, Result};
use crate::linalg::{svd_small, DEFAULT_RANK_TOL};
use crate::operator::{to_dense, LinearOperator};
use crate::rng::{Stream, SOURCE_STREAM};
use crate::vector::{combine, norm};

/// `x = (T^T T)^nu w` with `w` orthogonal to the kernel of `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceCondition {
    pub nu: f64,
    pub w: Vec<f64>,
    pub rho: f64,
}

/// Draws `w` from the source stream of `seed`, projects it onto the
/// orthogonal complement of the kernel of `T`, scales it to norm `rho` and
/// returns `(T^T T)^nu w`, all through a dense SVD of `T`.
pub fn make_source_solution(
    op: &dyn LinearOperator,
    nu: f64,
    seed: u64,
    rho: f64,
) -> Result<(SourceCondition, Vec<f64>)> {
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "nu must be nonnegative, got {nu}"
        )));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidArgument(format!("rho must be positive, got {rho}")));
    }
    let svd = svd_small(&to_dense(op), DEFAULT_RANK_TOL)?;
    if svd.rank == 0 {
        return Err(Error::InvalidArgument("operator is zero".into()));
    }
    let n = op.n_cols();
    let w0 = Stream::new(seed, SOURCE_STREAM).normal_vec(n);
    let right: Vec<Vec<f64>> = (0..svd.rank).map(|j| svd.right_vector(j)).collect();
    let mut c = crate::vector::project(&right, &w0);
    let nc = norm(&c);
    c.iter_mut().for_each(|v| *v *= rho / nc);
    let w = combine(&right, &c, n);
    let x = if nu == 0.0 {
        w.clone()
    } else {
        let weighted: Vec<f64> = c
            .iter()
            .zip(&svd.sigmas)
            .map(|(cj, s)| cj * s.powf(2.0 * nu))
            .collect();
        combine(&right, &weighted, n)
    };
    Ok((SourceCondition { nu, w, rho }, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::DenseMatrix;

    #[test]
    fn nu_zero_returns_w() {
        let t = DenseMatrix::random(6, 5, 1);
        let (sc, x) = make_source_solution(&t, 0.0, 3, 2.0).unwrap();
        assert_eq!(x, sc.w);
        assert!((norm(&sc.w) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn nu_one_is_two_applies() {
        let t = DenseMatrix::random(7, 5, 2);
        let (sc, x) = make_source_solution(&t, 1.0, 4, 1.0).unwrap();
        let direct = t.apply_adjoint(&t.apply(&sc.w).unwrap()).unwrap();
        assert!(crate::vector::relative_error(&direct, &x) < 1e-11);
    }

    #[test]
    fn kernel_component_removed() {
        let t = DenseMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0]]).unwrap();
        let (sc, _) = make_source_solution(&t, 0.5, 1, 1.0).unwrap();
        assert!(sc.w[2].abs() < 1e-15);
        assert!(make_source_solution(&t, -1.0, 1, 1.0).is_err());
    }
}
