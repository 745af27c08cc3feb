//! Convergence rate of the error as the noise level goes to zero.
//!
//! For each noise level the Krylov dimension is the smallest `ell` with
//! `h_l <= delta`, alpha comes from the known-norm rule with `C = 1` and
//! `E = ||x_dagger||`, and the slope of `log error` against `log delta` is
//! fitted by least squares.

use std::fmt::Write as _;

use igkt::krylov::estimate_h_ell;
use igkt::param::ParamStrategy;
use igkt::problems::add_noise;
use igkt::regularize::build_decomposition;
use igkt::vector::norm;
use igkt::{KrylovDecomposition, Method, ProjectedSolver};

use crate::config::ExperimentConfig;
use crate::{at_ell, HarnessError, Result};

/// Largest problem the study accepts; the source solution needs a dense SVD.
pub const MAX_RATE_DIM: usize = 512;

#[derive(Clone, Debug, PartialEq)]
pub struct RatePoint {
    pub method: Method,
    pub xi: f64,
    pub delta: f64,
    /// `None` when no `ell <= ell_max` reached `h_l <= delta`.
    pub ell: Option<usize>,
    pub h_ell: f64,
    pub i: usize,
    pub alpha: Option<f64>,
    pub rel_error: Option<f64>,
}

impl RatePoint {
    pub fn feasible(&self) -> bool {
        self.rel_error.is_some()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlopeFit {
    pub method: Method,
    pub i: usize,
    pub points: usize,
    /// `None` with fewer than three feasible points.
    pub slope: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateStudy {
    pub points: Vec<RatePoint>,
    pub slopes: Vec<SlopeFit>,
}

impl RateStudy {
    pub fn slope(&self, method: Method, i: usize) -> Option<f64> {
        self.slopes
            .iter()
            .find(|s| s.method == method && s.i == i)
            .and_then(|s| s.slope)
    }

    pub fn points_csv(&self) -> String {
        let mut s = String::from("method,xi,delta,ell,h_ell,i,alpha,rel_error,feasible\n");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        for p in &self.points {
            let _ = writeln!(
                s,
                "{},{:e},{:e},{},{:e},{},{},{},{}",
                p.method.token(),
                p.xi,
                p.delta,
                p.ell.map(|l| l.to_string()).unwrap_or_default(),
                p.h_ell,
                p.i,
                opt(p.alpha),
                opt(p.rel_error),
                p.feasible()
            );
        }
        s
    }

    pub fn slopes_csv(&self) -> String {
        let mut s = String::from("method,i,points,slope\n");
        for f in &self.slopes {
            let slope = f.slope.map(|x| format!("{x:e}")).unwrap_or_default();
            let _ = writeln!(s, "{},{},{},{}", f.method.token(), f.i, f.points, slope);
        }
        s
    }
}

/// Least-squares slope of `log y` against `log x`; `None` for fewer than
/// three points or when all `x` coincide.
pub fn fit_loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len());
    if x.len() < 3 || x.iter().chain(y).any(|v| !(*v > 0.0 && v.is_finite())) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Runs the study over `cfg.rate.xis` for every method and every `i` in
/// `cfg.iters`. The problem's noise seed fixes one noise direction which is
/// scaled to each level.
pub fn rate_study(cfg: &ExperimentConfig) -> Result<RateStudy> {
    cfg.validate()?;
    if cfg.rate.xis.is_empty() || cfg.rate.xis.iter().any(|x| !(*x > 0.0)) {
        return Err(HarnessError::Config(
            "rate study needs positive noise levels".into(),
        ));
    }
    let mut spec = cfg.problem.clone();
    spec.xi = 0.0;
    let problem = spec.build()?;
    let op = problem.op.as_ref();
    if op.n_rows().max(op.n_cols()) > MAX_RATE_DIM {
        return Err(HarnessError::Config(format!(
            "rate study needs n <= {MAX_RATE_DIM}, got {}x{}",
            op.n_rows(),
            op.n_cols()
        )));
    }
    let ell_max = cfg.rate.ell_max.min(op.n_rows()).min(op.n_cols()).max(1);
    let krylov = cfg.krylov_options();
    let power = cfg.power_config();
    let x_norm = norm(&problem.x_dagger);
    let strategy = ParamStrategy::KnownNorm { c: 1.0, e: x_norm };
    let iters = cfg.iter_list();

    let mut points = Vec::new();
    for method in cfg.methods()? {
        for &xi in &cfg.rate.xis {
            let (y_delta, delta) = add_noise(&problem.y_clean, xi, problem.seed)?;
            let full = build_decomposition(method, op, &y_delta, ell_max, &krylov)?;
            let mut chosen = None;
            let mut last_h = f64::NAN;
            for ell in 1..=full.ell_eff() {
                let d = at_ell(&full, ell)?;
                let h = estimate_h_ell(op, &d, &power);
                last_h = h;
                if h <= delta {
                    chosen = Some((ell, d, h));
                    break;
                }
            }
            match chosen {
                Some((ell, d, h)) => {
                    let solver = ProjectedSolver::from_decomposition(d, &y_delta, h, cfg.rank_tol)?;
                    for &i in &iters {
                        let r = solver.solve(&strategy, i, delta, Some(&problem.x_dagger))?;
                        points.push(RatePoint {
                            method,
                            xi,
                            delta,
                            ell: Some(ell),
                            h_ell: h,
                            i,
                            alpha: r.alpha,
                            rel_error: r.rel_error,
                        });
                    }
                }
                None => {
                    for &i in &iters {
                        points.push(RatePoint {
                            method,
                            xi,
                            delta,
                            ell: None,
                            h_ell: last_h,
                            i,
                            alpha: None,
                            rel_error: None,
                        });
                    }
                }
            }
        }
    }

    let mut slopes = Vec::new();
    for method in cfg.methods()? {
        for &i in &iters {
            let (d, e): (Vec<f64>, Vec<f64>) = points
                .iter()
                .filter(|p| p.method == method && p.i == i)
                .filter_map(|p| p.rel_error.map(|e| (p.delta, e)))
                .unzip();
            slopes.push(SlopeFit {
                method,
                i,
                points: d.len(),
                slope: fit_loglog_slope(&d, &e),
            });
        }
    }
    Ok(RateStudy { points, slopes })
}
