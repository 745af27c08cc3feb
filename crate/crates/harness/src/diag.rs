//! Approximation diagnostics as a function of `ell`, both methods side by
//! side.

use std::fmt::Write as _;

use igkt::problems::{assumption_diagnostics, DiagnosticReport};
use igkt::regularize::build_decomposition;
use igkt::{Method, TestProblem};

use crate::config::ExperimentConfig;
use crate::{at_ell, HarnessError, Result};

pub const DIAG_HEADER: &str = "ell,igkt_gap,igkt_gamma,igkt_h_rel,iat_gap,iat_gamma,iat_h_rel";

/// One `ell`; the Arnoldi columns are `None` for rectangular problems.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagRow {
    pub ell: usize,
    pub igkt: DiagnosticReport,
    pub iat: Option<DiagnosticReport>,
}

pub fn diag_to_csv(rows: &[DiagRow]) -> String {
    let mut s = String::from(DIAG_HEADER);
    s.push('\n');
    let cols = |r: Option<&DiagnosticReport>| match r {
        Some(r) => format!("{:e},{:e},{:e}", r.assumption_gap, r.gamma_ell, r.h_ell_rel),
        None => ",,".into(),
    };
    for r in rows {
        let _ = writeln!(s, "{},{},{}", r.ell, cols(Some(&r.igkt)), cols(r.iat.as_ref()));
    }
    s
}

/// `ell` runs over `cfg.diag.ell_min..=cfg.diag.ell_max` in steps of
/// `cfg.diag.ell_step`, capped at the operator dimensions. One decomposition
/// per method is built at the largest `ell` and truncated.
pub fn diagnostics_sweep(cfg: &ExperimentConfig) -> Result<Vec<DiagRow>> {
    let problem = cfg.problem.build()?;
    diagnostics_for(cfg, &problem)
}

pub fn diagnostics_for(cfg: &ExperimentConfig, problem: &TestProblem) -> Result<Vec<DiagRow>> {
    let spec = &cfg.diag;
    if spec.ell_min == 0 || spec.ell_step == 0 || spec.ell_min > spec.ell_max {
        return Err(HarnessError::Config(format!(
            "bad diag range {}..={} step {}",
            spec.ell_min, spec.ell_max, spec.ell_step
        )));
    }
    let op = problem.op.as_ref();
    let cap = op.n_rows().min(op.n_cols());
    let top = spec.ell_max.min(cap);
    let krylov = cfg.krylov_options();
    let power = cfg.power_config();
    let gk = build_decomposition(Method::Igkt, op, &problem.y_delta, top, &krylov)?;
    let ar = if problem.is_square() {
        Some(build_decomposition(
            Method::Iat,
            op,
            &problem.y_delta,
            top,
            &krylov,
        )?)
    } else {
        None
    };
    let mut rows = Vec::new();
    for ell in (spec.ell_min..=top).step_by(spec.ell_step) {
        let igkt = assumption_diagnostics(op, &at_ell(&gk, ell)?, &problem.x_dagger, &power)?;
        let iat = match &ar {
            Some(d) => Some(assumption_diagnostics(
                op,
                &at_ell(d, ell)?,
                &problem.x_dagger,
                &power,
            )?),
            None => None,
        };
        rows.push(DiagRow { ell, igkt, iat });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_leaves_missing_columns_empty() {
        let rep = DiagnosticReport {
            ell: 3,
            assumption_gap: 0.5,
            gamma_ell: 1.0,
            h_ell_rel: 0.25,
            h_ell: 0.25,
            op_norm: 1.0,
        };
        let csv = diag_to_csv(&[DiagRow {
            ell: 3,
            igkt: rep,
            iat: None,
        }]);
        assert_eq!(csv.lines().nth(1).unwrap(), "3,5e-1,1e0,2.5e-1,,,");
    }
}
