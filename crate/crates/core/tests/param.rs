mod common;

use common::{columns_na, to_na, vec_na};
use igkt::linalg::DEFAULT_RANK_TOL;
use igkt::param::{compute_rhs, feasibility, phi, project_data, solve_alpha, AlphaSolution};
use igkt::rng::Stream;
use igkt::{svd_small, DenseMatrix, ParamStrategy, ProjectedData};
use nalgebra::DMatrix;

fn random_data(seed: u64, len: usize) -> ProjectedData {
    let mut rng = Stream::new(seed, 19);
    let mut sigmas: Vec<f64> = (0..len)
        .map(|_| 10f64.powf(rng.uniform_range(-4.0, 1.0)))
        .collect();
    sigmas.sort_by(|a, b| b.total_cmp(a));
    let mut y_hat = rng.normal_vec(len + 1);
    y_hat[len] = 0.0;
    ProjectedData {
        reduced_norm: igkt::vector::norm(&y_hat),
        y_hat,
        sigmas,
        rank: len,
        degenerate: false,
    }
}

#[test]
fn identity_rotation_example() {
    let svd = svd_small(
        &DenseMatrix::from_rows(&[vec![1.0], vec![0.0]]).unwrap(),
        DEFAULT_RANK_TOL,
    )
    .unwrap();
    let d = project_data(&svd, &[3.0, 4.0]).unwrap();
    assert_eq!(d.y_hat, vec![3.0, 0.0]);
    assert!(!d.degenerate);
}

#[test]
fn null_data_is_degenerate() {
    let svd = svd_small(
        &DenseMatrix::from_rows(&[vec![1.0], vec![0.0]]).unwrap(),
        DEFAULT_RANK_TOL,
    )
    .unwrap();
    let d = project_data(&svd, &[0.0, 4.0]).unwrap();
    assert_eq!(d.y_hat, vec![0.0, 0.0]);
    assert!(d.degenerate);
    assert!(!solve_alpha(&d, 1, 1.0).unwrap().is_feasible());
}

#[test]
fn projected_norm_matches_dense_projector() {
    let t = DenseMatrix::random(12, 9, 3);
    let y = common::gaussian(4, 12);
    let dec = igkt::golub_kahan_bidiagonalize(&t, &y, 5, &igkt::KrylovOptions::default()).unwrap();
    let svd = svd_small(&dec.b, DEFAULT_RANK_TOL).unwrap();
    let y_red = columns_na(&dec.u).transpose() * vec_na(&y);
    let d = project_data(&svd, y_red.as_slice()).unwrap();
    let u = columns_na(&dec.u);
    let w = to_na(&svd.w);
    let mut i_proj = DMatrix::identity(6, 6);
    i_proj[(5, 5)] = 0.0;
    let r = &u * &w * i_proj * w.transpose() * u.transpose();
    let ry = r * vec_na(&y);
    assert!((ry.norm() - d.y_hat_norm()).abs() <= 1e-12 * ry.norm());
    assert!(d.y_hat_norm() <= d.reduced_norm);
}

#[test]
fn phi_matches_matrix_power() {
    let d = random_data(7, 6);
    let alpha = 0.37;
    let i = 2;
    let m = d.sigmas.len() + 1;
    let mut s = DMatrix::zeros(m, m);
    for (j, sj) in d.sigmas.iter().enumerate() {
        s[(j, j)] = sj * sj;
    }
    let shifted = (s + DMatrix::identity(m, m) * alpha).try_inverse().unwrap();
    let mut p = DMatrix::identity(m, m);
    for _ in 0..(2 * i + 1) {
        p = &p * &shifted;
    }
    // the last entry of y_hat is zero, so the alpha-only row does not contribute
    let y = vec_na(&d.y_hat);
    let dense = alpha.powi(2 * i as i32 + 1) * (y.transpose() * p * &y)[(0, 0)];
    let ours = phi(alpha, &d, i).unwrap();
    assert!((dense - ours).abs() <= 1e-11 * dense);
}

#[test]
fn phi_strictly_increasing() {
    for seed in 0..50 {
        let d = random_data(seed, 8);
        let i = 1 + (seed as usize % 4);
        for k in 0..60 {
            let a1 = 10f64.powf(-8.0 + 12.0 * k as f64 / 59.0);
            assert!(phi(1.1 * a1, &d, i).unwrap() > phi(a1, &d, i).unwrap());
        }
    }
}

#[test]
fn grid_oracle_brackets_root() {
    let d = random_data(99, 8);
    let i = 3;
    let rhs = 0.37 * d.y_hat_norm().powi(2);
    let alpha = solve_alpha(&d, i, rhs).unwrap().alpha().unwrap();
    let (lo, hi, n) = (-12.0f64, 6.0f64, 1_000_000);
    let step = (hi - lo) / (n - 1) as f64;
    let mut prev = phi(10f64.powf(lo), &d, i).unwrap();
    let mut found = None;
    for k in 1..n {
        let a = 10f64.powf(lo + step * k as f64);
        let v = phi(a, &d, i).unwrap();
        if prev < rhs && v >= rhs {
            found = Some((10f64.powf(lo + step * (k - 1) as f64), a));
            break;
        }
        prev = v;
    }
    let (a, b) = found.expect("sign change on grid");
    assert!(a <= alpha && alpha <= b, "{a} <= {alpha} <= {b}");
}

#[test]
fn roots_are_consistent_and_ordered() {
    for seed in 0..50 {
        let d = random_data(1000 + seed, 7);
        let yn = d.y_hat_norm();
        let h = 0.05 * yn;
        let delta = 0.1 * yn;
        let a = compute_rhs(&ParamStrategy::KnownNorm { c: 1.0, e: 1.0 }, h, delta, 0.0);
        let b = compute_rhs(&ParamStrategy::Discrepancy { tau: 1.0 }, h, delta, 0.0);
        assert!(b <= a);
        for i in [1, 2, 5, 20] {
            let ra = solve_alpha(&d, i, a).unwrap();
            let rb = solve_alpha(&d, i, b).unwrap();
            for (r, rhs) in [(ra, a), (rb, b)] {
                let alpha = r.alpha().unwrap();
                let v = phi(alpha, &d, i).unwrap();
                assert!((v - rhs).abs() <= 1e-9 * rhs);
            }
            assert!(rb.alpha().unwrap() <= ra.alpha().unwrap());
        }
    }
}

#[test]
fn feasibility_flag_is_the_literal_inequality() {
    for seed in 0..50 {
        let d = random_data(2000 + seed, 5);
        let yn = d.y_hat_norm();
        for f in [0.0, 0.2, 0.9, 0.999_999, 1.0, 1.000_001, 3.0] {
            let rhs = (f * yn).powi(2);
            let literal = rhs > 0.0 && rhs.sqrt() < yn;
            let sol = solve_alpha(&d, 2, rhs).unwrap();
            assert_eq!(sol.is_feasible(), literal, "f={f}");
            assert_eq!(feasibility(&d, rhs).is_ok(), literal);
            if let AlphaSolution::Root { alpha, .. } = sol {
                assert!(alpha > 0.0);
            }
        }
    }
}
