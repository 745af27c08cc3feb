mod common;

use common::{columns_na, decomposition_errors, gaussian, spectral_norm, to_na};
use igkt::krylov::Reorthogonalization;
use igkt::{
    arnoldi_decompose, estimate_h_ell, golub_kahan_bidiagonalize, spectral_norm_estimate, DenseMatrix,
    KrylovDecomposition, KrylovOptions, PowerConfig,
};
use nalgebra::DMatrix;

fn opts() -> KrylovOptions {
    KrylovOptions::default()
}

/// Orthonormal basis of the given vectors by classical Gram-Schmidt on the
/// explicit Krylov sequence.
fn gram_schmidt(vs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c: f64 = q.iter().zip(&w).map(|(a, b)| a * b).sum();
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let n = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        out.push(w.iter().map(|x| x / n).collect());
    }
    out
}

#[test]
fn diag_example_against_krylov_vectors() {
    let t = DenseMatrix::diagonal(&[2.0, 1.0]);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let y = vec![s, s];
    let d = golub_kahan_bidiagonalize(&t, &y, 1, &opts()).unwrap();
    let tty = t.matvec_transpose(&y);
    let v_oracle = gram_schmidt(std::slice::from_ref(&tty));
    assert!((d.v[0][0] - v_oracle[0][0]).abs() < 1e-15);
    assert!((d.v[0][1] - v_oracle[0][1]).abs() < 1e-15);
    let u_oracle = gram_schmidt(&[y.clone(), t.matvec(&tty)]);
    for (a, b) in d.u[1].iter().zip(&u_oracle[1]) {
        assert!((a - b).abs() < 1e-14);
    }
    assert!((d.alphas[0] - 2.5f64.sqrt()).abs() < 1e-14);
    assert!((d.betas[1] - 0.9f64.sqrt()).abs() < 1e-14);
}

fn grid() -> Vec<(DenseMatrix, Vec<f64>)> {
    let mut out = Vec::new();
    for (k, (m, n)) in [(10, 7), (12, 12), (20, 15), (15, 20), (30, 30), (40, 25)]
        .into_iter()
        .enumerate()
    {
        let t = DenseMatrix::random(m, n, 100 + k as u64);
        out.push((t, gaussian(200 + k as u64, m)));
    }
    out
}

#[test]
fn bidiagonalization_invariants_over_grid() {
    for (t, y) in grid() {
        let nmax = t.rows().min(t.cols());
        for ell in 1..=nmax {
            let d = golub_kahan_bidiagonalize(&t, &y, ell, &opts()).unwrap();
            let tn = d.norm_estimate;
            let (ou, ov, r1) = decomposition_errors(&t, &d);
            assert!(ou <= 1e-12 && ov <= 1e-12, "orth {ou} {ov}");
            assert!(r1 <= 1e-10 * tn);
            // second relation: T^T U_l = V B_{l,l}^T
            let l = d.ell_eff();
            let u = columns_na(&d.u[..l]);
            let v = columns_na(&d.v);
            let bll = to_na(&d.b).view((0, 0), (l, l)).into_owned();
            let r2 = (to_na(&t).transpose() * u - v * bll.transpose()).amax();
            assert!(r2 <= 1e-10 * tn);
            assert!(d.alphas.iter().all(|a| *a > 0.0));
            assert!(d.betas[..d.u.len()].iter().all(|b| *b > 0.0));
            assert!(d.b.is_lower_bidiagonal());
            let beta1 = d.betas[0];
            for (a, b) in d.u[0].iter().zip(&y) {
                assert!((a - b / beta1).abs() < 1e-15);
            }
        }
    }
}

#[test]
fn arnoldi_invariants_over_grid() {
    for (t, y) in grid().into_iter().filter(|(t, _)| t.rows() == t.cols()) {
        for ell in 1..=t.rows() {
            let d = arnoldi_decompose(&t, &y, ell, &opts()).unwrap();
            let (ol, _, r) = decomposition_errors(&t, &d);
            assert!(ol <= 1e-12);
            assert!(r <= 1e-10 * d.norm_estimate);
            for i in 0..d.h.rows() {
                for j in 0..d.h.cols() {
                    if i > j + 1 {
                        assert_eq!(d.h[(i, j)], 0.0);
                    }
                    if i == j + 1 {
                        assert!(d.h[(i, j)] > 0.0);
                    }
                }
            }
        }
    }
}

#[test]
fn h_ell_matches_dense_residual_norm() {
    let t = DenseMatrix::random(30, 20, 5);
    let y = gaussian(6, 30);
    let d = golub_kahan_bidiagonalize(&t, &y, 5, &opts()).unwrap();
    let approx = columns_na(&d.u) * to_na(&d.b) * columns_na(&d.v).transpose();
    let exact = spectral_norm(&(to_na(&t) - approx));
    let h = estimate_h_ell(&t, &d, &PowerConfig::default());
    assert!((h - exact).abs() <= 0.02 * exact, "{h} vs {exact}");
    assert!(h >= exact);
}

#[test]
fn h_ell_diag_example() {
    let t = DenseMatrix::diagonal(&[2.0, 1.0]);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let d = golub_kahan_bidiagonalize(&t, &[s, s], 1, &opts()).unwrap();
    let approx = columns_na(&d.u) * to_na(&d.b) * columns_na(&d.v).transpose();
    let exact = spectral_norm(&(to_na(&t) - approx));
    let h = estimate_h_ell(&t, &d, &PowerConfig::default());
    assert!((h - exact).abs() <= 0.02 * exact, "{h} vs {exact}");
}

#[test]
fn h_ell_bounded_by_operator_norm() {
    let t = DenseMatrix::random(25, 18, 9);
    let y = gaussian(10, 25);
    let tn = spectral_norm_estimate(&t, &PowerConfig::default());
    for ell in 1..=18 {
        let d = golub_kahan_bidiagonalize(&t, &y, ell, &opts()).unwrap();
        let h = estimate_h_ell(&t, &d, &PowerConfig::default());
        assert!(h.is_finite() && h <= 1.02 * tn);
        if ell == 18 {
            assert!(h <= 1e-10 * tn);
        }
    }
}

#[test]
fn reorthogonalization_does_not_change_well_conditioned_runs() {
    let t = DenseMatrix::random(50, 40, 13);
    let y = gaussian(14, 50);
    let plain = KrylovOptions {
        reorth: Reorthogonalization::None,
        ..opts()
    };
    for ell in 1..=10 {
        let a = golub_kahan_bidiagonalize(&t, &y, ell, &opts()).unwrap();
        let b = golub_kahan_bidiagonalize(&t, &y, ell, &plain).unwrap();
        for (x, z) in a.v.iter().zip(&b.v).chain(a.u.iter().zip(&b.u)) {
            let same: f64 = x.iter().zip(z).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            let flip: f64 = x.iter().zip(z).map(|(p, q)| (p + q).abs()).fold(0.0, f64::max);
            assert!(same.min(flip) < 1e-8);
        }
    }
}

#[test]
fn krylov_membership() {
    let t = DenseMatrix::random(9, 7, 15);
    let y = gaussian(16, 9);
    let d = golub_kahan_bidiagonalize(&t, &y, 5, &opts()).unwrap();
    let tn = to_na(&t);
    let mut seq = Vec::new();
    let mut k = tn.transpose() * common::vec_na(&y);
    for _ in 0..5 {
        seq.push(k.clone());
        k = tn.transpose() * (&tn * k);
    }
    for j in 0..5 {
        let basis = DMatrix::from_columns(&seq[..=j]);
        let q = basis.qr().q();
        let v = common::vec_na(&d.v[j]);
        let resid = &v - &q * (q.transpose() * &v);
        assert!(resid.norm() <= 1e-8, "v_{j}: {}", resid.norm());
    }
}

#[test]
fn arnoldi_projection_oracle() {
    let t = DenseMatrix::random(8, 8, 17);
    let y = gaussian(18, 8);
    let d = arnoldi_decompose(&t, &y, 4, &opts()).unwrap();
    let vl = columns_na(&d.v);
    let vr = columns_na(d.right_basis());
    let h = vl.transpose() * to_na(&t) * vr;
    assert!((h - to_na(&d.h)).amax() < 1e-10);
}
