//! Regularization-parameter selection.
//!
//! With the SVD `M = W Σ S^T` of the projected matrix and the reduced data
//! `y_red = L^T y_delta`, let `y_hat` hold the first `q` entries of
//! `W^T y_red` (`q` the numerical rank) and zeros elsewhere. The parameter is
//! the unique root of
//!
//! ```text
//! phi(alpha) = sum_j y_hat_j^2 (alpha / (sigma_j^2 + alpha))^(2i + 1) = rhs,
//! ```
//!
//! which is strictly increasing from 0 to `||y_hat||^2`. A root exists iff
//! `0 < sqrt(rhs) < ||y_hat||`.

use crate::error::{check_len, Error, Result};
use crate::linalg::SmallSvd;

/// Relative size below which all leading entries of `y_hat` count as zero.
pub const DEGENERATE_TOL: f64 = 1e-14;
/// Maximum number of sweeps of the self-referential fixed point.
pub const SELF_REF_MAX_SWEEPS: usize = 8;
/// Relative change of alpha that ends the self-referential fixed point.
pub const SELF_REF_TOL: f64 = 1e-6;

/// How the right-hand side of the parameter equation is formed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamStrategy {
    /// `(E h_l + C delta)^2` with `E = ||x_dagger||` known.
    KnownNorm { c: f64, e: f64 },
    /// `(D ||x_alpha|| h_l + C delta)^2`, solved by a fixed-point sweep.
    SelfReferential { c: f64, d: f64 },
    /// `tau delta^2`.
    Discrepancy { tau: f64 },
    /// No equation; the given alpha is used as is.
    Fixed { alpha: f64 },
}

impl ParamStrategy {
    pub fn token(&self) -> &'static str {
        match self {
            Self::KnownNorm { .. } => "a-known",
            Self::SelfReferential { .. } => "a-selfref",
            Self::Discrepancy { .. } => "b-tau",
            Self::Fixed { .. } => "fixed",
        }
    }

    /// Builds a strategy from its token and the constants that apply to it.
    pub fn from_token(token: &str, c: f64, e: f64, d: f64, tau: f64, alpha: f64) -> Result<Self> {
        let s = match token {
            "a-known" => Self::KnownNorm { c, e },
            "a-selfref" => Self::SelfReferential { c, d },
            "b-tau" => Self::Discrepancy { tau },
            "fixed" => Self::Fixed { alpha },
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown strategy '{other}' (expected a-known, a-selfref, b-tau or fixed)"
                )))
            }
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(what.to_string()));
        match *self {
            Self::KnownNorm { c, e } => {
                if !(c > 0.0 && c.is_finite()) {
                    return bad("C must be positive");
                }
                if !(e >= 0.0 && e.is_finite()) {
                    return bad("E must be nonnegative");
                }
            }
            Self::SelfReferential { c, d } => {
                if !(c > 0.0 && c.is_finite()) {
                    return bad("C must be positive");
                }
                if !(d >= 1.0 && d.is_finite()) {
                    return bad("D must be at least 1");
                }
            }
            Self::Discrepancy { tau } => {
                if !(tau >= 1.0 && tau.is_finite()) {
                    return bad("tau must be at least 1");
                }
            }
            Self::Fixed { alpha } => {
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return bad("fixed alpha must be positive");
                }
            }
        }
        Ok(())
    }
}

/// Right-hand side of the parameter equation. Zero for [`ParamStrategy::Fixed`].
pub fn compute_rhs(strategy: &ParamStrategy, h_ell: f64, delta: f64, x_norm_estimate: f64) -> f64 {
    match *strategy {
        ParamStrategy::KnownNorm { c, e } => (e * h_ell + c * delta).powi(2),
        ParamStrategy::SelfReferential { c, d } => (d * x_norm_estimate * h_ell + c * delta).powi(2),
        ParamStrategy::Discrepancy { tau } => tau * delta * delta,
        ParamStrategy::Fixed { .. } => 0.0,
    }
}

/// Reduced data rotated into the singular basis of the projected matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectedData {
    /// `W^T y_red` with entries from index `rank` on set to zero.
    pub y_hat: Vec<f64>,
    /// Singular values of the projected matrix.
    pub sigmas: Vec<f64>,
    pub rank: usize,
    /// All leading `rank` entries of `y_hat` vanish.
    pub degenerate: bool,
    /// `||y_red||`.
    pub reduced_norm: f64,
}

impl ProjectedData {
    pub fn y_hat_norm(&self) -> f64 {
        crate::vector::norm(&self.y_hat)
    }
}

pub fn project_data(svd: &SmallSvd, y_reduced: &[f64]) -> Result<ProjectedData> {
    check_len("project_data", svd.w.rows(), y_reduced.len())?;
    let mut y_hat = svd.w.matvec_transpose(y_reduced);
    for v in y_hat.iter_mut().skip(svd.rank) {
        *v = 0.0;
    }
    let reduced_norm = crate::vector::norm(y_reduced);
    let degenerate = y_hat[..svd.rank]
        .iter()
        .all(|v| v.abs() <= DEGENERATE_TOL * reduced_norm);
    Ok(ProjectedData {
        y_hat,
        sigmas: svd.sigmas.clone(),
        rank: svd.rank,
        degenerate,
        reduced_norm,
    })
}

/// `(alpha / (sigma^2 + alpha))^p`, evaluated without forming `alpha^p`.
fn ratio_pow(alpha: f64, sigma: f64, p: f64) -> f64 {
    (-p * (sigma * sigma / alpha).ln_1p()).exp()
}

fn check_iters(i: usize) -> Result<()> {
    if i == 0 {
        Err(Error::InvalidArgument(
            "iteration count must be at least 1".into(),
        ))
    } else {
        Ok(())
    }
}

fn phi_unchecked(alpha: f64, data: &ProjectedData, i: usize) -> f64 {
    let p = (2 * i + 1) as f64;
    data.y_hat[..data.rank]
        .iter()
        .zip(&data.sigmas)
        .fold(0.0, |acc, (y, s)| acc + y * y * ratio_pow(alpha, *s, p))
}

/// `phi(alpha)` and its derivative with respect to `ln alpha`.
fn phi_and_slope(alpha: f64, data: &ProjectedData, i: usize) -> (f64, f64) {
    let p = (2 * i + 1) as f64;
    let mut value = 0.0;
    let mut slope = 0.0;
    for (y, s) in data.y_hat[..data.rank].iter().zip(&data.sigmas) {
        let term = y * y * ratio_pow(alpha, *s, p);
        value += term;
        slope += term * p * s * s / (s * s + alpha);
    }
    (value, slope)
}

/// The left-hand side of the parameter equation.
pub fn phi(alpha: f64, data: &ProjectedData, i: usize) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    check_iters(i)?;
    Ok(phi_unchecked(alpha, data, i))
}

/// Why no parameter could be chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Infeasibility {
    /// `rhs = 0`; `phi` is positive for every positive alpha.
    ZeroRhs,
    /// `sqrt(rhs) >= ||y_hat||`.
    ExceedsData { rhs_sqrt: f64, y_hat_norm: f64 },
    /// The data has no component on the nonzero singular values.
    Degenerate,
    /// Rounding prevented a sign change of `phi - rhs` inside the search range.
    NoBracket,
}

impl std::fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::ZeroRhs => write!(f, "right-hand side is zero"),
            Self::ExceedsData { rhs_sqrt, y_hat_norm } => {
                write!(
                    f,
                    "sqrt(rhs) = {rhs_sqrt:e} is not below ||y_hat|| = {y_hat_norm:e}"
                )
            }
            Self::Degenerate => write!(f, "projected data is degenerate"),
            Self::NoBracket => write!(f, "no sign change found for the parameter equation"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlphaSolution {
    Root { alpha: f64, phi: f64, iterations: usize },
    Infeasible(Infeasibility),
}

impl AlphaSolution {
    pub fn alpha(&self) -> Option<f64> {
        match self {
            Self::Root { alpha, .. } => Some(*alpha),
            Self::Infeasible(_) => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Root { .. })
    }
}

/// The feasibility inequality `0 < sqrt(rhs) < ||y_hat||` for non-degenerate
/// data, or the reason it fails.
pub fn feasibility(data: &ProjectedData, rhs: f64) -> std::result::Result<(), Infeasibility> {
    if data.degenerate || data.rank == 0 {
        return Err(Infeasibility::Degenerate);
    }
    if !(rhs > 0.0) {
        return Err(Infeasibility::ZeroRhs);
    }
    let rhs_sqrt = rhs.sqrt();
    let y_hat_norm = data.y_hat_norm();
    if rhs_sqrt >= y_hat_norm {
        return Err(Infeasibility::ExceedsData { rhs_sqrt, y_hat_norm });
    }
    Ok(())
}

const MAX_ROOT_ITERS: usize = 300;

/// The unique `alpha > 0` with `phi(alpha) = rhs`.
///
/// Works in `t = ln alpha`: a bracket `[1e-14 sigma_1^2, 1e6 max(sigma_1^2, rhs)]`
/// is widened geometrically until `phi - rhs` changes sign, then Newton steps
/// are taken inside the bracket and replaced by bisection whenever they leave
/// it or stall. Stops once `|phi - rhs| <= 1e-12 rhs` or the bracket has
/// shrunk below `1e-12` in `t` (a relative change in alpha of `1e-12`).
pub fn solve_alpha(data: &ProjectedData, i: usize, rhs: f64) -> Result<AlphaSolution> {
    check_iters(i)?;
    if !rhs.is_finite() || rhs < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "rhs must be finite and nonnegative, got {rhs}"
        )));
    }
    if let Err(why) = feasibility(data, rhs) {
        return Ok(AlphaSolution::Infeasible(why));
    }
    let s1sq = data.sigmas[0] * data.sigmas[0];
    let f = |t: f64| phi_and_slope(t.exp(), data, i);

    let mut lo = (1e-14 * s1sq).ln();
    let mut hi = (1e6 * s1sq.max(rhs)).ln();
    let step = 1e4f64.ln();
    let mut widen = 0;
    while f(lo).0 >= rhs {
        lo -= step;
        widen += 1;
        if lo < f64::MIN_POSITIVE.ln() + step || widen > 200 {
            return Ok(AlphaSolution::Infeasible(Infeasibility::NoBracket));
        }
    }
    while f(hi).0 <= rhs {
        hi += step;
        widen += 1;
        if hi > f64::MAX.ln() - step || widen > 200 {
            return Ok(AlphaSolution::Infeasible(Infeasibility::NoBracket));
        }
    }

    let tol = 1e-12 * rhs;
    let mut t = 0.5 * (lo + hi);
    let mut last_width = hi - lo;
    for it in 1..=MAX_ROOT_ITERS {
        let (val, slope) = f(t);
        let g = val - rhs;
        if g.abs() <= tol || hi - lo <= 1e-12 * t.abs().max(1.0) {
            return Ok(AlphaSolution::Root {
                alpha: t.exp(),
                phi: val,
                iterations: it,
            });
        }
        if g > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let newton = if slope > 0.0 { t - g / slope } else { f64::NAN };
        let width = hi - lo;
        let inside = newton.is_finite() && newton > lo && newton < hi;
        t = if inside && (it == 1 || width < 0.75 * last_width) {
            newton
        } else {
            0.5 * (lo + hi)
        };
        last_width = width;
    }
    let val = phi_unchecked(t.exp(), data, i);
    Ok(AlphaSolution::Root {
        alpha: t.exp(),
        phi: val,
        iterations: MAX_ROOT_ITERS,
    })
}

/// Result of the self-referential fixed point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelfReferentialOutcome {
    pub solution: AlphaSolution,
    /// Last norm estimate used to form the right-hand side.
    pub x_norm: f64,
    pub rhs: f64,
    pub sweeps: usize,
    pub converged: bool,
}

/// Solves `phi(alpha) = (D ||x_alpha|| h + C delta)^2` by fixed-point sweeps.
///
/// `x_norm_of` returns `||x_alpha||` for a given alpha. The first sweep uses
/// the root for `(C delta)^2`; each later sweep recomputes the norm and
/// re-solves. Stops after [`SELF_REF_MAX_SWEEPS`] sweeps or once alpha
/// changes by less than [`SELF_REF_TOL`] relatively.
pub fn solve_alpha_self_referential<F>(
    data: &ProjectedData,
    i: usize,
    c: f64,
    d: f64,
    h_ell: f64,
    delta: f64,
    mut x_norm_of: F,
) -> Result<SelfReferentialOutcome>
where
    F: FnMut(f64) -> Result<f64>,
{
    let strategy = ParamStrategy::SelfReferential { c, d };
    strategy.validate()?;
    let mut rhs = compute_rhs(&strategy, h_ell, delta, 0.0);
    let mut sol = solve_alpha(data, i, rhs)?;
    let mut x_norm = 0.0;
    let mut sweeps = 0;
    while let AlphaSolution::Root { alpha, .. } = sol {
        if sweeps == SELF_REF_MAX_SWEEPS {
            break;
        }
        sweeps += 1;
        x_norm = x_norm_of(alpha)?;
        rhs = compute_rhs(&strategy, h_ell, delta, x_norm);
        sol = solve_alpha(data, i, rhs)?;
        if let AlphaSolution::Root { alpha: next, .. } = sol {
            if (next - alpha).abs() <= SELF_REF_TOL * alpha {
                return Ok(SelfReferentialOutcome {
                    solution: sol,
                    x_norm,
                    rhs,
                    sweeps,
                    converged: true,
                });
            }
        }
    }
    Ok(SelfReferentialOutcome {
        solution: sol,
        x_norm,
        rhs,
        sweeps,
        converged: false,
    })
}
