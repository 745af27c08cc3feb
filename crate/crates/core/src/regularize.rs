//! Iterated Tikhonov in full space and in Krylov subspaces.
//!
//! For `alpha > 0` and `i >= 1` the iterated Tikhonov iterate is
//! `x_i = sum_{k=1}^{i} alpha^{k-1} (T^T T + alpha I)^{-k} T^T y`. It is always
//! computed through the recurrence
//! `x_k = (T^T T + alpha I)^{-1} (T^T y + alpha x_{k-1})`, `x_0 = 0`, with one
//! Cholesky factor reused for every `k`.

use std::time::{Duration, Instant};

use crate::error::{check_len, Error, Result};
use crate::krylov::{
    arnoldi_decompose, estimate_h_ell, golub_kahan_bidiagonalize, AnyDecomposition, ArnoldiDecomposition,
    BidiagDecomposition, KrylovDecomposition, KrylovOptions,
};
use crate::linalg::{svd_small, ShiftedNormalFactor, SmallSvd, DEFAULT_RANK_TOL};
use crate::operator::{DenseMatrix, LinearOperator, PowerConfig};
use crate::param::{
    compute_rhs, project_data, solve_alpha, solve_alpha_self_referential, AlphaSolution, Infeasibility,
    ParamStrategy, ProjectedData,
};
use crate::vector::{norm, relative_error};

/// Which Krylov process backs the solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Golub-Kahan bidiagonalization (iGKT); any operator shape.
    Igkt,
    /// Arnoldi process (iAT); square operators only.
    Iat,
}

impl Method {
    pub fn token(&self) -> &'static str {
        match self {
            Self::Igkt => "igkt",
            Self::Iat => "iat",
        }
    }

    pub fn from_token(s: &str) -> Result<Self> {
        match s {
            "igkt" => Ok(Self::Igkt),
            "iat" => Ok(Self::Iat),
            other => Err(Error::InvalidArgument(format!(
                "unknown method '{other}' (expected igkt or iat)"
            ))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

fn check_alpha_iters(alpha: f64, i: usize) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if i == 0 {
        return Err(Error::InvalidArgument(
            "iteration count must be at least 1".into(),
        ));
    }
    Ok(())
}

/// Runs the recurrence with a prepared factor of `M^T M + alpha I` and
/// `m_ty = M^T y`.
pub fn iterate_with_factor(factor: &ShiftedNormalFactor, m_ty: &[f64], alpha: f64, i: usize) -> Vec<f64> {
    let mut x = vec![0.0; m_ty.len()];
    for _ in 0..i {
        for (xk, b) in x.iter_mut().zip(m_ty) {
            *xk = b + alpha * *xk;
        }
        factor.solve_in_place(&mut x);
    }
    x
}

/// Iterated Tikhonov on a dense operator (direct, small problems only).
pub fn iterated_tikhonov_full(t: &DenseMatrix, y: &[f64], alpha: f64, i: usize) -> Result<Vec<f64>> {
    check_alpha_iters(alpha, i)?;
    check_len("iterated_tikhonov_full", t.rows(), y.len())?;
    let factor = ShiftedNormalFactor::from_gram(&t.gram(), alpha)?;
    Ok(iterate_with_factor(&factor, &t.matvec_transpose(y), alpha, i))
}

/// Iterated Tikhonov on a projected matrix `M` with reduced data `y_proj`.
///
/// Uses the banded factor when `M` is lower bidiagonal.
pub fn reduced_iterated_tikhonov(m: &DenseMatrix, y_proj: &[f64], alpha: f64, i: usize) -> Result<Vec<f64>> {
    check_alpha_iters(alpha, i)?;
    check_len("reduced_iterated_tikhonov", m.rows(), y_proj.len())?;
    let factor = ShiftedNormalFactor::new(m, alpha)?;
    Ok(iterate_with_factor(
        &factor,
        &m.matvec_transpose(y_proj),
        alpha,
        i,
    ))
}

/// `1 - (alpha / (sigma^2 + alpha))^i`, accurate for small and large ratios.
pub fn filter_factor(alpha: f64, sigma: f64, i: usize) -> f64 {
    -(-(i as f64) * (sigma * sigma / alpha).ln_1p()).exp_m1()
}

/// The same iterate through the SVD: `S diag(f_j / sigma_j) (W^T y_proj)`
/// over the first `rank` components.
pub fn reduced_iterated_tikhonov_svd(
    svd: &SmallSvd,
    y_proj: &[f64],
    alpha: f64,
    i: usize,
) -> Result<Vec<f64>> {
    check_alpha_iters(alpha, i)?;
    check_len("reduced_iterated_tikhonov_svd", svd.w.rows(), y_proj.len())?;
    let wy = svd.w.matvec_transpose(y_proj);
    Ok(svd_filter_solution(svd, &wy, alpha, i))
}

fn svd_filter_solution(svd: &SmallSvd, y_hat: &[f64], alpha: f64, i: usize) -> Vec<f64> {
    let k = svd.s.rows();
    let mut z = vec![0.0; k];
    for (j, (&sigma, &yj)) in svd.sigmas.iter().zip(y_hat).enumerate().take(svd.rank) {
        let c = filter_factor(alpha, sigma, i) / sigma * yj;
        for (r, zr) in z.iter_mut().enumerate() {
            *zr += c * svd.s[(r, j)];
        }
    }
    z
}

/// Settings of one regularized solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularizationConfig {
    pub ell: usize,
    pub iters: usize,
    pub strategy: ParamStrategy,
    pub krylov: KrylovOptions,
    pub rank_tol: f64,
    /// Power iteration used for `h_l`.
    pub h_power: PowerConfig,
}

impl RegularizationConfig {
    pub fn new(ell: usize, iters: usize, strategy: ParamStrategy) -> Self {
        Self {
            ell,
            iters,
            strategy,
            krylov: KrylovOptions::default(),
            rank_tol: DEFAULT_RANK_TOL,
            h_power: PowerConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ell == 0 {
            return Err(Error::InvalidArgument("ell must be at least 1".into()));
        }
        if self.iters == 0 {
            return Err(Error::InvalidArgument(
                "iteration count must be at least 1".into(),
            ));
        }
        self.strategy.validate()
    }
}

/// Outcome of one solve. Infeasible solves carry no alpha and empty vectors.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub method: Method,
    pub strategy: ParamStrategy,
    pub alpha: Option<f64>,
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub ell_requested: usize,
    pub ell_eff: usize,
    pub iters: usize,
    pub h_ell: f64,
    pub delta: f64,
    /// Right-hand side of the parameter equation (none for a fixed alpha).
    pub rhs: Option<f64>,
    /// `||y_hat||`, the bound the square root of `rhs` must stay below.
    pub y_hat_norm: f64,
    pub feasible: bool,
    pub infeasibility: Option<Infeasibility>,
    /// Sweeps and convergence of the self-referential fixed point.
    pub fixed_point: Option<(usize, bool)>,
    pub rel_error: Option<f64>,
    pub wall_time: Duration,
}

/// A Krylov decomposition together with the SVD of its projected matrix and
/// the rotated data, shared by every `(alpha, i)` solved at this dimension.
pub struct ProjectedSolver {
    method: Method,
    decomp: AnyDecomposition,
    svd: SmallSvd,
    y_reduced: Vec<f64>,
    m_ty: Vec<f64>,
    data: ProjectedData,
    h_ell: f64,
}

impl ProjectedSolver {
    /// Builds the decomposition of `op` started at `y_delta` and all derived
    /// projected quantities, including `h_l`.
    pub fn build(
        method: Method,
        op: &dyn LinearOperator,
        y_delta: &[f64],
        ell: usize,
        krylov: &KrylovOptions,
        rank_tol: f64,
        h_power: &PowerConfig,
    ) -> Result<Self> {
        let decomp = build_decomposition(method, op, y_delta, ell, krylov)?;
        let h_ell = estimate_h_ell(op, &decomp, h_power);
        Self::from_decomposition(decomp, y_delta, h_ell, rank_tol)
    }

    /// Wraps an existing decomposition with a known `h_l`.
    pub fn from_decomposition(
        decomp: AnyDecomposition,
        y_delta: &[f64],
        h_ell: f64,
        rank_tol: f64,
    ) -> Result<Self> {
        let method = match decomp {
            AnyDecomposition::Bidiag(_) => Method::Igkt,
            AnyDecomposition::Arnoldi(_) => Method::Iat,
        };
        let y_reduced = decomp.project_left(y_delta);
        let svd = svd_small(decomp.projected(), rank_tol)?;
        let data = project_data(&svd, &y_reduced)?;
        let m_ty = decomp.projected().matvec_transpose(&y_reduced);
        Ok(Self {
            method,
            decomp,
            svd,
            y_reduced,
            m_ty,
            data,
            h_ell,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn decomposition(&self) -> &AnyDecomposition {
        &self.decomp
    }

    pub fn bidiagonal(&self) -> Option<&BidiagDecomposition> {
        match &self.decomp {
            AnyDecomposition::Bidiag(d) => Some(d),
            AnyDecomposition::Arnoldi(_) => None,
        }
    }

    pub fn arnoldi(&self) -> Option<&ArnoldiDecomposition> {
        match &self.decomp {
            AnyDecomposition::Arnoldi(d) => Some(d),
            AnyDecomposition::Bidiag(_) => None,
        }
    }

    pub fn svd(&self) -> &SmallSvd {
        &self.svd
    }

    pub fn data(&self) -> &ProjectedData {
        &self.data
    }

    pub fn y_reduced(&self) -> &[f64] {
        &self.y_reduced
    }

    pub fn h_ell(&self) -> f64 {
        self.h_ell
    }

    /// Reduced iterate `z` for a given alpha (Cholesky recurrence).
    pub fn reduced_solution(&self, alpha: f64, i: usize) -> Result<Vec<f64>> {
        check_alpha_iters(alpha, i)?;
        let factor = ShiftedNormalFactor::new(self.decomp.projected(), alpha)?;
        Ok(iterate_with_factor(&factor, &self.m_ty, alpha, i))
    }

    /// `(z, x = V z)` for a given alpha.
    pub fn solve_fixed(&self, alpha: f64, i: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let z = self.reduced_solution(alpha, i)?;
        let x = self.decomp.expand(&z);
        Ok((z, x))
    }

    /// Selects alpha per `strategy` and solves.
    pub fn solve(
        &self,
        strategy: &ParamStrategy,
        i: usize,
        delta: f64,
        x_dagger: Option<&[f64]>,
    ) -> Result<SolveReport> {
        strategy.validate()?;
        if i == 0 {
            return Err(Error::InvalidArgument(
                "iteration count must be at least 1".into(),
            ));
        }
        if !(delta >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "delta must be nonnegative, got {delta}"
            )));
        }
        let start = Instant::now();
        let mut fixed_point = None;
        let (solution, rhs) = match *strategy {
            ParamStrategy::Fixed { alpha } => (
                AlphaSolution::Root {
                    alpha,
                    phi: f64::NAN,
                    iterations: 0,
                },
                None,
            ),
            ParamStrategy::SelfReferential { c, d } => {
                let out = solve_alpha_self_referential(&self.data, i, c, d, self.h_ell, delta, |a| {
                    Ok(norm(&svd_filter_solution(&self.svd, &self.data.y_hat, a, i)))
                })?;
                fixed_point = Some((out.sweeps, out.converged));
                (out.solution, Some(out.rhs))
            }
            _ => {
                let rhs = compute_rhs(strategy, self.h_ell, delta, 0.0);
                (solve_alpha(&self.data, i, rhs)?, Some(rhs))
            }
        };
        let (alpha, z, x, infeasibility) = match solution {
            AlphaSolution::Root { alpha, .. } => {
                let (z, x) = self.solve_fixed(alpha, i)?;
                (Some(alpha), z, x, None)
            }
            AlphaSolution::Infeasible(why) => (None, Vec::new(), Vec::new(), Some(why)),
        };
        let rel_error = match (x_dagger, alpha) {
            (Some(xd), Some(_)) => {
                check_len("x_dagger", x.len(), xd.len())?;
                Some(relative_error(xd, &x))
            }
            _ => None,
        };
        Ok(SolveReport {
            method: self.method,
            strategy: *strategy,
            alpha,
            x,
            z,
            ell_requested: self.decomp.ell_requested(),
            ell_eff: self.decomp.ell_eff(),
            iters: i,
            h_ell: self.h_ell,
            delta,
            rhs,
            y_hat_norm: self.data.y_hat_norm(),
            feasible: alpha.is_some(),
            infeasibility,
            fixed_point,
            rel_error,
            wall_time: start.elapsed(),
        })
    }
}

/// Runs the Krylov process of `method`.
pub fn build_decomposition(
    method: Method,
    op: &dyn LinearOperator,
    y_delta: &[f64],
    ell: usize,
    krylov: &KrylovOptions,
) -> Result<AnyDecomposition> {
    Ok(match method {
        Method::Igkt => golub_kahan_bidiagonalize(op, y_delta, ell, krylov)?.into(),
        Method::Iat => arnoldi_decompose(op, y_delta, ell, krylov)?.into(),
    })
}

fn solve_with(
    method: Method,
    op: &dyn LinearOperator,
    y_delta: &[f64],
    cfg: &RegularizationConfig,
    delta: f64,
    x_dagger: Option<&[f64]>,
) -> Result<SolveReport> {
    cfg.validate()?;
    let start = Instant::now();
    let solver = ProjectedSolver::build(
        method,
        op,
        y_delta,
        cfg.ell,
        &cfg.krylov,
        cfg.rank_tol,
        &cfg.h_power,
    )?;
    let mut report = solver.solve(&cfg.strategy, cfg.iters, delta, x_dagger)?;
    report.wall_time = start.elapsed();
    Ok(report)
}

/// The iterated Golub-Kahan-Tikhonov method. With `iters = 1` this is the
/// plain Golub-Kahan-Tikhonov method.
///
/// `x_dagger`, when known, is only used to fill in `rel_error`.
pub fn igkt_solve(
    op: &dyn LinearOperator,
    y_delta: &[f64],
    cfg: &RegularizationConfig,
    delta: f64,
    x_dagger: Option<&[f64]>,
) -> Result<SolveReport> {
    solve_with(Method::Igkt, op, y_delta, cfg, delta, x_dagger)
}

/// The iterated Arnoldi-Tikhonov method; rejects non-square operators.
pub fn iat_solve(
    op: &dyn LinearOperator,
    y_delta: &[f64],
    cfg: &RegularizationConfig,
    delta: f64,
    x_dagger: Option<&[f64]>,
) -> Result<SolveReport> {
    if !op.is_square() {
        return Err(Error::NonSquare {
            context: "iat_solve",
            rows: op.n_rows(),
            cols: op.n_cols(),
        });
    }
    solve_with(Method::Iat, op, y_delta, cfg, delta, x_dagger)
}
