use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use igkt_harness::config::{parse_list, ExperimentConfig};
use igkt_harness::diag::{diag_to_csv, diagnostics_sweep};
use igkt_harness::experiment::{run_experiment_with, Artifacts};
use igkt_harness::{rate_study, HarnessError, Result};

/// Iterated Tikhonov regularization in Krylov subspaces: experiment runner.
#[derive(Parser, Debug)]
#[command(name = "igkt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one (ell, i) cell and write the solution vector.
    Solve(Common),
    /// Sweep the (method, ell, i, strategy) grid and write results.csv.
    Sweep(Common),
    /// Fit the error rate as the noise level goes to zero.
    Rate(Common),
    /// Approximation diagnostics over a range of ell.
    Diag(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// blur1d | blur2d | motion | tomo
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    /// zero | reflexive
    #[arg(long)]
    boundary: Option<String>,
    /// Relative noise level.
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// igkt | iat | both
    #[arg(long)]
    method: Option<String>,
    /// Comma separated Krylov dimensions.
    #[arg(long)]
    ell: Option<String>,
    /// Comma separated iteration counts.
    #[arg(long)]
    iters: Option<String>,
    /// Comma separated: a-known | a-selfref | b-tau | fixed
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    e: Option<f64>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    /// Regularization parameter for the fixed strategy.
    #[arg(long)]
    alpha: Option<f64>,
    /// Comma separated noise levels for the rate study.
    #[arg(long)]
    xis: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    emit_images: bool,
    #[arg(long)]
    dump_decomp: bool,
    /// Fill in the time_s column (makes the CSV run-dependent).
    #[arg(long)]
    timings: bool,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        let p = &mut cfg.problem;
        if let Some(v) = &self.problem {
            p.kind = v.clone();
        }
        if let Some(v) = self.n {
            p.n = v;
        }
        if let Some(v) = self.gamma {
            p.gamma = v;
        }
        if let Some(v) = &self.boundary {
            p.boundary = v.clone();
        }
        if let Some(v) = self.xi {
            p.xi = v;
        }
        if let Some(v) = self.seed {
            p.seed = v;
        }
        if let Some(v) = &self.method {
            cfg.method = v.clone();
        }
        if let Some(v) = &self.ell {
            cfg.ell = parse_list(v)?;
        }
        if let Some(v) = &self.iters {
            cfg.iters = parse_list(v)?;
        }
        if let Some(v) = &self.strategy {
            cfg.strategy = parse_list(v)?;
        }
        if let Some(v) = &self.xis {
            cfg.rate.xis = parse_list(v)?;
        }
        cfg.c = self.c.unwrap_or(cfg.c);
        cfg.e = self.e.or(cfg.e);
        cfg.d = self.d.unwrap_or(cfg.d);
        cfg.tau = self.tau.unwrap_or(cfg.tau);
        cfg.alpha = self.alpha.or(cfg.alpha);
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        cfg.emit_images |= self.emit_images;
        cfg.dump_decomp |= self.dump_decomp;
        cfg.timings |= self.timings;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(c) => {
            let cfg = c.resolve()?;
            if cfg.ell.len() != 1 || cfg.iters.len() != 1 || cfg.methods()?.len() != 1 {
                return Err(HarnessError::Config(
                    "solve takes a single method, ell and i; use sweep for grids".into(),
                ));
            }
            let rows = run_experiment_with(
                &cfg,
                Artifacts {
                    images: cfg.emit_images,
                    decomp: cfg.dump_decomp,
                    solutions: true,
                },
            )?;
            for r in &rows {
                match (r.alpha, r.rel_error) {
                    (Some(a), Some(e)) => println!(
                        "{} ell={} i={} {}: alpha={a:e} rel_error={e:e} h_ell={:e} delta={:e}",
                        r.method.token(),
                        r.ell,
                        r.i,
                        r.strategy,
                        r.h_ell,
                        r.delta
                    ),
                    _ => println!(
                        "{} ell={} i={} {}: infeasible (h_ell={:e} delta={:e})",
                        r.method.token(),
                        r.ell,
                        r.i,
                        r.strategy,
                        r.h_ell,
                        r.delta
                    ),
                }
            }
        }
        Command::Sweep(c) => {
            let cfg = c.resolve()?;
            let rows = run_experiment_with(
                &cfg,
                Artifacts {
                    images: cfg.emit_images,
                    decomp: cfg.dump_decomp,
                    solutions: false,
                },
            )?;
            let feasible = rows.iter().filter(|r| r.feasible).count();
            println!(
                "{} cells ({feasible} feasible) -> {}",
                rows.len(),
                cfg.out.join("results.csv").display()
            );
        }
        Command::Rate(c) => {
            let cfg = c.resolve()?;
            let study = rate_study(&cfg)?;
            fs::create_dir_all(&cfg.out)?;
            fs::write(cfg.out.join("rate.csv"), study.points_csv())?;
            fs::write(cfg.out.join("rate_slopes.csv"), study.slopes_csv())?;
            for s in &study.slopes {
                match s.slope {
                    Some(v) => println!(
                        "{} i={}: slope {v:.4} over {} points",
                        s.method.token(),
                        s.i,
                        s.points
                    ),
                    None => println!(
                        "{} i={}: no slope ({} feasible points, need 3)",
                        s.method.token(),
                        s.i,
                        s.points
                    ),
                }
            }
        }
        Command::Diag(c) => {
            let cfg = c.resolve()?;
            let rows = diagnostics_sweep(&cfg)?;
            fs::create_dir_all(&cfg.out)?;
            let path = cfg.out.join("diag.csv");
            fs::write(&path, diag_to_csv(&rows))?;
            println!("{} rows -> {}", rows.len(), path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
