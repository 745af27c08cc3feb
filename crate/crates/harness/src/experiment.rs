//! `(method, ell, i, strategy)` sweeps.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use igkt::io::{write_matrix_file, write_pgm_file, write_vector_file};
use igkt::krylov::estimate_h_ell;
use igkt::regularize::build_decomposition;
use igkt::vector::{norm, sub};
use igkt::{
    AnyDecomposition, DenseMatrix, KrylovDecomposition, Method, ProjectedSolver, SolveReport, TestProblem,
};

use crate::config::ExperimentConfig;
use crate::{HarnessError, Result};

pub const CSV_HEADER: &str = "method,ell,i,strategy,alpha,rel_error,feasible,h_ell,delta,time_s";

/// One cell of a sweep. Infeasible cells have no `alpha` or `rel_error`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub method: Method,
    pub ell: usize,
    pub i: usize,
    pub strategy: String,
    pub alpha: Option<f64>,
    pub rel_error: Option<f64>,
    pub feasible: bool,
    pub h_ell: f64,
    pub delta: f64,
    /// Setup of this `ell` plus parameter choice and solve.
    pub time: Duration,
}

impl ResultRow {
    fn from_report(r: &SolveReport, ell: usize, setup: Duration) -> Self {
        Self {
            method: r.method,
            ell,
            i: r.iters,
            strategy: r.strategy.token().to_string(),
            alpha: r.alpha,
            rel_error: r.rel_error,
            feasible: r.feasible,
            h_ell: r.h_ell,
            delta: r.delta,
            time: setup + r.wall_time,
        }
    }

    /// The CSV line; `time_s` is left empty unless `timings` is set so that
    /// repeated runs are byte-identical.
    pub fn csv_line(&self, timings: bool) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        let time = if timings {
            format!("{:.6}", self.time.as_secs_f64())
        } else {
            String::new()
        };
        format!(
            "{},{},{},{},{},{},{},{:e},{:e},{}",
            self.method.token(),
            self.ell,
            self.i,
            self.strategy,
            opt(self.alpha),
            opt(self.rel_error),
            self.feasible,
            self.h_ell,
            self.delta,
            time
        )
    }
}

pub fn rows_to_csv(rows: &[ResultRow], timings: bool) -> String {
    let mut s = String::with_capacity(64 * (rows.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(s, "{}", r.csv_line(timings));
    }
    s
}

/// What to write besides `results.csv`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Artifacts {
    pub images: bool,
    pub decomp: bool,
    pub solutions: bool,
}

/// Runs the sweep described by `cfg` and writes `results.csv` (and any
/// requested artifacts) into `cfg.out`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let artifacts = Artifacts {
        images: cfg.emit_images,
        decomp: cfg.dump_decomp,
        solutions: false,
    };
    run_experiment_with(cfg, artifacts)
}

pub fn run_experiment_with(cfg: &ExperimentConfig, artifacts: Artifacts) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let problem = cfg.problem.build()?;
    fs::create_dir_all(&cfg.out)?;
    if artifacts.images {
        write_problem_images(cfg, &problem)?;
    }
    let mut dumped = HashSet::new();
    let rows = sweep(cfg, &problem, |solver, row, report| {
        let tag = format!("{}_l{}_i{}_{}", row.method.token(), row.ell, row.i, row.strategy);
        if artifacts.decomp && dumped.insert((row.method.token(), row.ell)) {
            dump_decomposition(&cfg.out, row.method, row.ell, solver.decomposition())?;
        }
        if !report.feasible {
            return Ok(());
        }
        if artifacts.solutions {
            write_vector_file(&cfg.out.join(format!("x_{tag}.mtx")), &report.x)?;
        }
        if artifacts.images {
            if let Some((r, c)) = problem.image_shape {
                write_pgm_file(&cfg.out.join(format!("restored_{tag}.pgm")), &report.x, r, c)?;
                let err = sub(&report.x, &problem.x_dagger);
                write_pgm_file(&cfg.out.join(format!("residual_{tag}.pgm")), &err, r, c)?;
            }
        }
        Ok(())
    })?;
    fs::write(cfg.out.join("results.csv"), rows_to_csv(&rows, cfg.timings))?;
    Ok(rows)
}

/// Solves every cell of `cfg` on `problem`, building one decomposition per
/// `(method, ell)` and reusing it for every `i` and strategy. `on_cell` sees
/// the cells in output order.
pub fn sweep<F>(cfg: &ExperimentConfig, problem: &TestProblem, mut on_cell: F) -> Result<Vec<ResultRow>>
where
    F: FnMut(&ProjectedSolver, &ResultRow, &SolveReport) -> Result<()>,
{
    cfg.validate()?;
    let methods = cfg.methods()?;
    if methods.len() > 1 && !problem.is_square() {
        return Err(HarnessError::Config(format!(
            "method 'both' needs a square problem, got {}x{}",
            problem.op.n_rows(),
            problem.op.n_cols()
        )));
    }
    let strategies = cfg.strategies(norm(&problem.x_dagger))?;
    let krylov = cfg.krylov_options();
    let power = cfg.power_config();
    let op = problem.op.as_ref();
    let mut rows = Vec::new();
    for &method in &methods {
        for ell in cfg.ell_list() {
            let start = Instant::now();
            let decomp = build_decomposition(method, op, &problem.y_delta, ell, &krylov)?;
            let h_ell = estimate_h_ell(op, &decomp, &power);
            let solver = ProjectedSolver::from_decomposition(decomp, &problem.y_delta, h_ell, cfg.rank_tol)?;
            let setup = start.elapsed();
            for i in cfg.iter_list() {
                for s in &strategies {
                    let report = solver.solve(s, i, problem.delta, Some(&problem.x_dagger))?;
                    let row = ResultRow::from_report(&report, ell, setup);
                    on_cell(&solver, &row, &report)?;
                    rows.push(row);
                }
            }
        }
    }
    Ok(rows)
}

/// Writes `exact.pgm` and the observed data: `observed.pgm` for blurs,
/// `sinogram.pgm` (one row per angle) for tomography.
fn write_problem_images(cfg: &ExperimentConfig, problem: &TestProblem) -> Result<()> {
    let Some((r, c)) = problem.image_shape else {
        return Ok(());
    };
    write_pgm_file(&cfg.out.join("exact.pgm"), &problem.x_dagger, r, c)?;
    let m = problem.y_delta.len();
    if m == r * c {
        write_pgm_file(&cfg.out.join("observed.pgm"), &problem.y_delta, r, c)?;
    } else if cfg.problem.kind == "tomo" && cfg.problem.angles > 0 && m.is_multiple_of(cfg.problem.angles) {
        let a = cfg.problem.angles;
        write_pgm_file(&cfg.out.join("sinogram.pgm"), &problem.y_delta, a, m / a)?;
    }
    Ok(())
}

/// Writes the bases and projected matrix under `decomp/<method>_l<ell>/`:
/// `U.mtx`, `V.mtx`, `B.mtx` for Golub-Kahan, `V.mtx`, `H.mtx` for Arnoldi.
pub fn dump_decomposition(out: &Path, method: Method, ell: usize, d: &AnyDecomposition) -> Result<()> {
    let dir = out.join("decomp").join(format!("{}_l{ell}", method.token()));
    fs::create_dir_all(&dir)?;
    let cols = |basis: &[Vec<f64>]| DenseMatrix::from_columns(basis.first().map_or(0, Vec::len), basis);
    match d {
        AnyDecomposition::Bidiag(_) => {
            write_matrix_file(&dir.join("U.mtx"), &cols(d.left_basis()))?;
            write_matrix_file(&dir.join("V.mtx"), &cols(d.right_basis()))?;
            write_matrix_file(&dir.join("B.mtx"), d.projected())?;
        }
        AnyDecomposition::Arnoldi(_) => {
            write_matrix_file(&dir.join("V.mtx"), &cols(d.left_basis()))?;
            write_matrix_file(&dir.join("H.mtx"), d.projected())?;
        }
    }
    Ok(())
}
