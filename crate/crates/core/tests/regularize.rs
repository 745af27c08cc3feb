mod common;

use common::{columns_na, gaussian, random_bidiagonal, rel, to_na, vec_na};
use igkt::krylov::KrylovDecomposition;
use igkt::linalg::DEFAULT_RANK_TOL;
use igkt::problems::{Boundary, TestProblem};
use igkt::regularize::{iterated_tikhonov_full, reduced_iterated_tikhonov, reduced_iterated_tikhonov_svd};
use igkt::{
    golub_kahan_bidiagonalize, iat_solve, igkt_solve, solve_shifted_normal, svd_small, DenseMatrix,
    KrylovOptions, Method, ParamStrategy, ProjectedSolver, RegularizationConfig,
};
use nalgebra::{DMatrix, DVector};

/// `sum_{k=1}^{i} alpha^{k-1} (M^T M + alpha I)^{-k} M^T y` evaluated literally.
fn literal_sum(m: &DenseMatrix, y: &[f64], alpha: f64, i: usize) -> Vec<f64> {
    let mn = to_na(m);
    let n = m.cols();
    let inv = (mn.transpose() * &mn + DMatrix::identity(n, n) * alpha)
        .try_inverse()
        .unwrap();
    let mty = mn.transpose() * vec_na(y);
    let mut power = inv.clone();
    let mut acc = DVector::zeros(n);
    for k in 1..=i {
        acc += alpha.powi(k as i32 - 1) * &power * &mty;
        power = &power * &inv;
    }
    acc.as_slice().to_vec()
}

#[test]
fn recurrence_equals_literal_sum() {
    let t = DenseMatrix::random(6, 6, 41);
    let y = gaussian(42, 6);
    let x = iterated_tikhonov_full(&t, &y, 0.5, 4).unwrap();
    assert!(rel(&literal_sum(&t, &y, 0.5, 4), &x) < 1e-11);
    for (alpha, i) in [(0.1, 1), (1.0, 3), (3.0, 7)] {
        let b = random_bidiagonal(6, 43);
        let yb = gaussian(44, 7);
        let z = reduced_iterated_tikhonov(&b, &yb, alpha, i).unwrap();
        assert!(rel(&literal_sum(&b, &yb, alpha, i), &z) < 1e-11);
    }
}

#[test]
fn cholesky_and_svd_paths_agree() {
    let b = random_bidiagonal(7, 45);
    let y = gaussian(46, 8);
    let svd = svd_small(&b, DEFAULT_RANK_TOL).unwrap();
    let a = reduced_iterated_tikhonov(&b, &y, 0.2, 5).unwrap();
    let s = reduced_iterated_tikhonov_svd(&svd, &y, 0.2, 5).unwrap();
    assert!(rel(&a, &s) < 1e-11);
}

#[test]
fn single_iteration_is_plain_gkt() {
    let b = random_bidiagonal(5, 47);
    let y = gaussian(48, 6);
    let z = reduced_iterated_tikhonov(&b, &y, 0.3, 1).unwrap();
    let gkt = solve_shifted_normal(&b, 0.3, &b.matvec_transpose(&y)).unwrap();
    assert_eq!(z, gkt);
}

#[test]
fn full_dimension_igkt_matches_full_space() {
    let t = DenseMatrix::random(12, 9, 49);
    let y = gaussian(50, 12);
    for alpha in [1e-3, 1.0, 10.0] {
        for i in [1, 3, 10] {
            let cfg = RegularizationConfig::new(9, i, ParamStrategy::Fixed { alpha });
            let rep = igkt_solve(&t, &y, &cfg, 0.0, None).unwrap();
            let full = iterated_tikhonov_full(&t, &y, alpha, i).unwrap();
            assert!(rel(&full, &rep.x) < 1e-9, "alpha {alpha} i {i}");
        }
    }
}

#[test]
fn full_dimension_iat_matches_full_space() {
    let t = DenseMatrix::random(7, 7, 51);
    let y = gaussian(52, 7);
    for alpha in [1e-3, 1.0, 10.0] {
        for i in [1, 3, 10] {
            let cfg = RegularizationConfig::new(7, i, ParamStrategy::Fixed { alpha });
            let rep = iat_solve(&t, &y, &cfg, 0.0, None).unwrap();
            let full = iterated_tikhonov_full(&t, &y, alpha, i).unwrap();
            assert!(rel(&full, &rep.x) < 1e-9, "alpha {alpha} i {i}");
        }
    }
}

#[test]
fn both_methods_are_self_consistent_on_symmetric_operators() {
    let a = DenseMatrix::random(10, 10, 53);
    let t = a.gram();
    let y = gaussian(54, 10);
    let cfg = RegularizationConfig::new(4, 3, ParamStrategy::Fixed { alpha: 0.2 });
    for method in [Method::Igkt, Method::Iat] {
        let s =
            ProjectedSolver::build(method, &t, &y, 4, &cfg.krylov, DEFAULT_RANK_TOL, &cfg.h_power).unwrap();
        let rep = s.solve(&cfg.strategy, 3, 0.0, None).unwrap();
        let d = s.decomposition();
        let z = reduced_iterated_tikhonov(d.projected(), &d.project_left(&y), 0.2, 3).unwrap();
        assert!(rel(&z, &rep.z) < 1e-10);
        let x = columns_na(d.right_basis()) * vec_na(&z);
        assert!(rel(x.as_slice(), &rep.x) < 1e-10);
    }
}

#[test]
fn shift_identity() {
    let t = DenseMatrix::random(14, 10, 55);
    let y = gaussian(56, 14);
    let d = golub_kahan_bidiagonalize(&t, &y, 4, &KrylovOptions::default()).unwrap();
    let u = columns_na(&d.u);
    let v = columns_na(&d.v);
    let b = to_na(&d.b);
    let tl = &u * &b * v.transpose();
    for alpha in [0.01, 1.0] {
        let lhs = (tl.transpose() * &tl + DMatrix::identity(10, 10) * alpha)
            .try_inverse()
            .unwrap()
            * &v;
        let rhs = &v
            * (b.transpose() * &b + DMatrix::identity(4, 4) * alpha)
                .try_inverse()
                .unwrap();
        for j in 0..4 {
            let (l, r) = (lhs.column(j), rhs.column(j));
            assert!((l - r).norm() <= 1e-10 * r.norm());
        }
    }
}

#[test]
fn error_decreases_with_iterations_without_noise() {
    let t = DenseMatrix::random(8, 6, 57);
    let x_true = gaussian(58, 6);
    let y = t.matvec(&x_true);
    let alpha = 0.05;
    let mut last = f64::INFINITY;
    for i in 1..=15 {
        let x = iterated_tikhonov_full(&t, &y, alpha, i).unwrap();
        let e = rel(&x_true, &x);
        assert!(e <= last * (1.0 + 1e-12), "i={i}: {e} > {last}");
        last = e;
    }
}

#[test]
fn strategies_report_feasibility() {
    let p = TestProblem::blur_1d(64, 2.0, Boundary::Zero, 1.0, 0.0, 3).unwrap();
    let cfg = RegularizationConfig::new(5, 1, ParamStrategy::Discrepancy { tau: 1.0 });
    let rep = igkt_solve(p.op.as_ref(), &p.y_delta, &cfg, p.delta, Some(&p.x_dagger)).unwrap();
    assert!(!rep.feasible);
    assert!(rep.alpha.is_none() && rep.rel_error.is_none() && rep.x.is_empty());

    let p = TestProblem::blur_1d(64, 2.0, Boundary::Zero, 1.0, 0.01, 3).unwrap();
    for strategy in [
        ParamStrategy::Discrepancy { tau: 1.0 },
        ParamStrategy::KnownNorm {
            c: 1.0,
            e: igkt::vector::norm(&p.x_dagger),
        },
        ParamStrategy::SelfReferential { c: 1.0, d: 1.0 },
    ] {
        let cfg = RegularizationConfig::new(40, 2, strategy);
        let rep = igkt_solve(p.op.as_ref(), &p.y_delta, &cfg, p.delta, Some(&p.x_dagger)).unwrap();
        assert!(rep.feasible, "{strategy:?}: {:?}", rep.infeasibility);
        assert!(rep.alpha.unwrap() > 0.0);
        assert!(rep.rel_error.unwrap() < 1.0);
        if let ParamStrategy::SelfReferential { .. } = strategy {
            let (sweeps, _) = rep.fixed_point.unwrap();
            assert!((1..=8).contains(&sweeps));
        }
    }
}

#[test]
fn igkt_beats_iat_on_nonsymmetric_blur() {
    let p = TestProblem::motion_blur(64, 9, 1.0, 0.02, 11).unwrap();
    let ko = KrylovOptions::default();
    let hp = igkt::PowerConfig::default();
    let g = ProjectedSolver::build(
        Method::Igkt,
        p.op.as_ref(),
        &p.y_delta,
        40,
        &ko,
        DEFAULT_RANK_TOL,
        &hp,
    )
    .unwrap();
    let a = ProjectedSolver::build(
        Method::Iat,
        p.op.as_ref(),
        &p.y_delta,
        40,
        &ko,
        DEFAULT_RANK_TOL,
        &hp,
    )
    .unwrap();
    let strategy = ParamStrategy::Discrepancy { tau: 1.0 };
    for ell in [10, 20, 40] {
        let gs = ProjectedSolver::from_decomposition(
            g.decomposition().truncated(ell).unwrap(),
            &p.y_delta,
            0.0,
            DEFAULT_RANK_TOL,
        )
        .unwrap();
        let as_ = ProjectedSolver::from_decomposition(
            a.decomposition().truncated(ell).unwrap(),
            &p.y_delta,
            0.0,
            DEFAULT_RANK_TOL,
        )
        .unwrap();
        for i in [1, 50, 200] {
            let eg = gs
                .solve(&strategy, i, p.delta, Some(&p.x_dagger))
                .unwrap()
                .rel_error
                .unwrap();
            let ea = as_
                .solve(&strategy, i, p.delta, Some(&p.x_dagger))
                .unwrap()
                .rel_error
                .unwrap();
            assert!(eg <= ea, "ell {ell} i {i}: igkt {eg} iat {ea}");
        }
    }
}
