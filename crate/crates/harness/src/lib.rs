//! Experiment harness for `igkt`: `(ell, i)` sweeps with CSV and PGM output,
//! convergence-rate studies and approximation diagnostics.

// NaN must fail range checks, so `!(x > 0.0)` is used deliberately.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use thiserror::Error;

pub mod config;
pub mod diag;
pub mod experiment;
pub mod rate;

pub use config::{ExperimentConfig, ProblemSpec};
pub use diag::{diagnostics_sweep, DiagRow};
pub use experiment::{run_experiment, ResultRow, CSV_HEADER};
pub use rate::{fit_loglog_slope, rate_study, RatePoint, RateStudy};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot parse config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Core(#[from] igkt::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

/// The decomposition restricted to `ell` steps, or all of it when it broke
/// down earlier.
pub(crate) fn at_ell(d: &igkt::AnyDecomposition, ell: usize) -> Result<igkt::AnyDecomposition> {
    use igkt::KrylovDecomposition;
    if ell >= d.ell_eff() {
        Ok(d.clone())
    } else {
        Ok(d.truncated(ell)?)
    }
}
