//! Experiment configuration.
//!
//! A config file is TOML with top-level run keys and optional `[problem]`,
//! `[rate]` and `[diag]` tables. Every key has a default, so an empty file
//! is valid:
//!
//! ```toml
//! method = "igkt"          # igkt | iat | both
//! ell = [20]
//! iters = [1]
//! strategy = ["b-tau"]     # a-known | a-selfref | b-tau | fixed
//! c = 1.0                  # a-known, a-selfref
//! # e = 1.0                # a-known; defaults to ||x_dagger||
//! d = 1.0                  # a-selfref
//! tau = 1.0                # b-tau
//! # alpha = 1e-3           # fixed
//! out = "out"
//! emit_images = false
//! dump_decomp = false
//! timings = false
//! reorth = true            # full reorthogonalization
//! rank_tol = 1e-12
//! power_iters = 200        # power iterations for h_l
//!
//! [problem]
//! kind = "blur2d"          # blur1d | blur2d | motion | tomo
//! n = 64
//! gamma = 3.0
//! boundary = "zero"        # zero | reflexive
//! xi = 0.01
//! seed = 11
//! nu = 1.0                 # blur1d source exponent
//! motion_len = 9           # motion
//! angles = 12              # tomo
//! # rays = 45              # tomo; defaults to floor(n sqrt 2)
//!
//! [rate]
//! xis = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4]
//! ell_max = 150
//!
//! [diag]
//! ell_min = 1
//! ell_max = 40
//! ell_step = 1
//! ```

use std::path::{Path, PathBuf};

use igkt::krylov::{KrylovOptions, Reorthogonalization};
use igkt::param::ParamStrategy;
use igkt::problems::Boundary;
use igkt::{Method, PowerConfig, TestProblem};
use serde::{Deserialize, Serialize};

use crate::{HarnessError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemSpec {
    pub kind: String,
    pub n: usize,
    pub gamma: f64,
    pub boundary: String,
    pub xi: f64,
    pub seed: u64,
    pub nu: f64,
    pub motion_len: usize,
    pub angles: usize,
    pub rays: Option<usize>,
}

impl Default for ProblemSpec {
    fn default() -> Self {
        Self {
            kind: "blur2d".into(),
            n: 64,
            gamma: 3.0,
            boundary: "zero".into(),
            xi: 0.01,
            seed: 11,
            nu: 1.0,
            motion_len: 9,
            angles: 12,
            rays: None,
        }
    }
}

impl ProblemSpec {
    /// Generates the problem. Names: `blur1d`, `blur2d`, `motion`, `tomo`.
    pub fn build(&self) -> Result<TestProblem> {
        let boundary = Boundary::from_token(&self.boundary)?;
        let p = match self.kind.as_str() {
            "blur1d" => TestProblem::blur_1d(self.n, self.gamma, boundary, self.nu, self.xi, self.seed)?,
            "blur2d" => TestProblem::blur_2d(self.n, self.gamma, boundary, self.xi, self.seed)?,
            "motion" => TestProblem::motion_blur(self.n, self.motion_len, self.gamma, self.xi, self.seed)?,
            "tomo" => TestProblem::tomography(self.n, self.angles, self.rays, self.xi, self.seed)?,
            other => {
                return Err(HarnessError::Config(format!(
                    "unknown problem '{other}' (expected blur1d, blur2d, motion or tomo)"
                )))
            }
        };
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RateSpec {
    pub xis: Vec<f64>,
    /// Largest Krylov dimension searched for `h_l <= delta`.
    pub ell_max: usize,
}

impl Default for RateSpec {
    fn default() -> Self {
        Self {
            xis: vec![1e-2, 3e-3, 1e-3, 3e-4, 1e-4],
            ell_max: 150,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagSpec {
    pub ell_min: usize,
    pub ell_max: usize,
    pub ell_step: usize,
}

impl Default for DiagSpec {
    fn default() -> Self {
        Self {
            ell_min: 1,
            ell_max: 40,
            ell_step: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub method: String,
    pub ell: Vec<usize>,
    pub iters: Vec<usize>,
    pub strategy: Vec<String>,
    pub c: f64,
    pub e: Option<f64>,
    pub d: f64,
    pub tau: f64,
    pub alpha: Option<f64>,
    pub out: PathBuf,
    pub emit_images: bool,
    pub dump_decomp: bool,
    pub timings: bool,
    pub reorth: bool,
    pub rank_tol: f64,
    pub power_iters: usize,
    pub problem: ProblemSpec,
    pub rate: RateSpec,
    pub diag: DiagSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            method: "igkt".into(),
            ell: vec![20],
            iters: vec![1],
            strategy: vec!["b-tau".into()],
            c: 1.0,
            e: None,
            d: 1.0,
            tau: 1.0,
            alpha: None,
            out: PathBuf::from("out"),
            emit_images: false,
            dump_decomp: false,
            timings: false,
            reorth: true,
            rank_tol: 1e-12,
            power_iters: 200,
            problem: ProblemSpec::default(),
            rate: RateSpec::default(),
            diag: DiagSpec::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        Ok(toml::from_str(s)?)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn methods(&self) -> Result<Vec<Method>> {
        match self.method.as_str() {
            "both" => Ok(vec![Method::Igkt, Method::Iat]),
            other => Ok(vec![Method::from_token(other)?]),
        }
    }

    /// Strategies in configured order; `e` defaults to `||x_dagger||`.
    pub fn strategies(&self, x_dagger_norm: f64) -> Result<Vec<ParamStrategy>> {
        self.strategy
            .iter()
            .map(|tok| {
                let e = self.e.unwrap_or(x_dagger_norm);
                let alpha = match (tok.as_str(), self.alpha) {
                    ("fixed", None) => {
                        return Err(HarnessError::Config("strategy 'fixed' needs alpha".into()))
                    }
                    (_, a) => a.unwrap_or(1.0),
                };
                let s = ParamStrategy::from_token(tok, self.c, e, self.d, self.tau, alpha)?;
                s.validate()?;
                Ok(s)
            })
            .collect()
    }

    pub fn krylov_options(&self) -> KrylovOptions {
        KrylovOptions {
            reorth: if self.reorth {
                Reorthogonalization::Full
            } else {
                Reorthogonalization::None
            },
            ..KrylovOptions::default()
        }
    }

    pub fn power_config(&self) -> PowerConfig {
        PowerConfig {
            max_iters: self.power_iters,
            ..PowerConfig::default()
        }
    }

    /// Sorted, deduplicated ell list.
    pub fn ell_list(&self) -> Vec<usize> {
        sorted_unique(&self.ell)
    }

    pub fn iter_list(&self) -> Vec<usize> {
        sorted_unique(&self.iters)
    }

    /// Checks everything that does not need the problem itself.
    pub fn validate(&self) -> Result<()> {
        if self.ell.is_empty() || self.iters.is_empty() {
            return Err(HarnessError::Config(
                "ell and iters lists must be nonempty".into(),
            ));
        }
        if self.ell.contains(&0) || self.iters.contains(&0) {
            return Err(HarnessError::Config(
                "ell and iters entries must be at least 1".into(),
            ));
        }
        if self.strategy.is_empty() {
            return Err(HarnessError::Config("strategy list must be nonempty".into()));
        }
        self.methods()?;
        self.strategies(1.0)?;
        Boundary::from_token(&self.problem.boundary)?;
        if !(self.problem.xi >= 0.0) {
            return Err(HarnessError::Config(format!(
                "xi must be nonnegative, got {}",
                self.problem.xi
            )));
        }
        if self.power_iters == 0 {
            return Err(HarnessError::Config("power_iters must be at least 1".into()));
        }
        Ok(())
    }
}

fn sorted_unique(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Parses a comma separated list, e.g. `10,20,40`.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<T>()
                .map_err(|_| HarnessError::Config(format!("cannot parse list entry '{t}'")))
        })
        .collect()
}
