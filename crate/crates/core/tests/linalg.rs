mod common;

use common::{from_na, random_bidiagonal, rel, to_na, vec_na};
use igkt::linalg::DEFAULT_RANK_TOL;
use igkt::{solve_shifted_normal, svd_small, DenseMatrix, ShiftedNormalFactor};
use nalgebra::SymmetricEigen;
use proptest::prelude::*;

#[test]
fn sigmas_match_gram_eigenvalues() {
    let m = DenseMatrix::random(9, 8, 31);
    let svd = svd_small(&m, DEFAULT_RANK_TOL).unwrap();
    let g = to_na(&m).transpose() * to_na(&m);
    let mut eig: Vec<f64> = SymmetricEigen::new(g)
        .eigenvalues
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    for (a, b) in svd.sigmas.iter().zip(&eig) {
        assert!((a - b).abs() <= 1e-10 * b, "{a} vs {b}");
    }
    assert!(svd.reconstruct().max_abs_diff(&m) <= 1e-12 * svd.sigmas[0]);
}

#[test]
fn bidiagonal_solve_matches_lu() {
    let b = random_bidiagonal(6, 4);
    let rhs = common::gaussian(5, 6);
    let z = solve_shifted_normal(&b, 0.3, &rhs).unwrap();
    let bn = to_na(&b);
    let a = bn.transpose() * &bn + nalgebra::DMatrix::identity(6, 6) * 0.3;
    let oracle = a.lu().solve(&vec_na(&rhs)).unwrap();
    assert!(rel(oracle.as_slice(), &z) < 1e-11);
}

#[test]
fn dense_solve_matches_lu() {
    let h = DenseMatrix::random(7, 6, 9);
    let rhs = common::gaussian(6, 6);
    let z = solve_shifted_normal(&h, 0.05, &rhs).unwrap();
    assert!(matches!(
        ShiftedNormalFactor::new(&h, 0.05).unwrap(),
        ShiftedNormalFactor::Dense { .. }
    ));
    let hn = to_na(&h);
    let a = hn.transpose() * &hn + nalgebra::DMatrix::identity(6, 6) * 0.05;
    let oracle = a.clone().lu().solve(&vec_na(&rhs)).unwrap();
    assert!(rel(oracle.as_slice(), &z) < 1e-11);
    let residual = a * nalgebra::DVector::from_column_slice(&z) - vec_na(&rhs);
    assert!(residual.norm() <= 1e-12 * common::vec_na(&rhs).norm());
}

#[test]
fn filter_identity() {
    for (b, seed) in [(random_bidiagonal(6, 1), 1u64), (DenseMatrix::random(8, 5, 2), 2)] {
        let svd = svd_small(&b, DEFAULT_RANK_TOL).unwrap();
        for alpha in [1e-3, 0.4, 7.0] {
            for j in 0..b.cols() {
                let sj = svd.s.column(j);
                let z = solve_shifted_normal(&b, alpha, &sj).unwrap();
                let expect: Vec<f64> = sj.iter().map(|v| v / (svd.sigmas[j].powi(2) + alpha)).collect();
                assert!(rel(&expect, &z) < 1e-11, "seed {seed} alpha {alpha} j {j}");
            }
        }
    }
}

#[test]
fn rank_follows_tolerance() {
    let m = from_na(&nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(
        vec![1.0, 1e-6, 1e-13],
    )));
    assert_eq!(svd_small(&m, 1e-12).unwrap().rank, 2);
    assert_eq!(svd_small(&m, 1e-5).unwrap().rank, 1);
}

fn matrix_strategy() -> impl Strategy<Value = DenseMatrix> {
    (1usize..9, 1usize..9, any::<u64>()).prop_map(|(r, c, seed)| DenseMatrix::random(r, c, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn svd_invariants(m in matrix_strategy()) {
        let svd = svd_small(&m, DEFAULT_RANK_TOL).unwrap();
        let wt = to_na(&svd.w);
        let st = to_na(&svd.s);
        prop_assert!((wt.transpose() * &wt - nalgebra::DMatrix::identity(m.rows(), m.rows())).amax() <= 1e-13);
        prop_assert!((st.transpose() * &st - nalgebra::DMatrix::identity(m.cols(), m.cols())).amax() <= 1e-13);
        prop_assert!(svd.reconstruct().max_abs_diff(&m) <= 1e-12 * svd.sigmas[0]);
        prop_assert!(svd.sigmas.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn sigmas_invariant_under_permutation(m in matrix_strategy(), shift in 0usize..8) {
        let (r, c) = (m.rows(), m.cols());
        let mut p = DenseMatrix::zeros(r, c);
        for i in 0..r {
            for j in 0..c {
                p[((i + shift) % r, (j * 3 + shift) % c)] = m[(i, j)];
            }
        }
        // (j * 3) mod c is a permutation only when gcd(3, c) = 1
        prop_assume!(c % 3 != 0);
        let a = svd_small(&m, DEFAULT_RANK_TOL).unwrap().sigmas;
        let b = svd_small(&p, DEFAULT_RANK_TOL).unwrap().sigmas;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-12 * a[0].max(1.0));
        }
    }
}
