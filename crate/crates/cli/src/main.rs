//! `critical-hawkes`: command-line front end for simulation, deterministic
//! numerics, and the verification experiments.
//!
//! Exit codes: 0 when every check passes, 2 when a check fails, 1 on usage,
//! configuration, or runtime errors.

use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use critical_hawkes::harness::criteria::{run_criterion, CRITERIA};
use critical_hawkes::harness::experiments::{limit_log_laplace, simulate_scaled_limit};
use critical_hawkes::harness::{run_clt_experiment, run_limit_comparison, ExperimentConfig, Report};
use critical_hawkes::kernels::KernelSpec;
use critical_hawkes::renewal::{build_resolvent, solve_g, Grid, TestFunction};
use critical_hawkes::simulator::{run_replicas, simulate_hawkes, SimOptions};

#[derive(Debug, Parser)]
#[command(name = "critical-hawkes", version, about = "Critical marked Hawkes processes: simulation, numerics, scaling limits")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// experiment configuration (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// master seed, overrides the config
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// output directory, overrides the config
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate event streams and counting paths
    Simulate {
        #[arg(long)]
        horizon: f64,
        #[arg(long, default_value_t = 1)]
        replicas: usize,
        /// spacing of the counting-path grid (default: horizon/100)
        #[arg(long)]
        count_step: Option<f64>,
        /// skip the per-event file
        #[arg(long)]
        no_events: bool,
    },
    /// Tabulate the discretized resolvent
    Resolvent {
        /// ParetoTail, MittagLeffler or StableDensity (default: from config)
        #[arg(long)]
        kernel: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        dt: f64,
        #[arg(long)]
        horizon: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the Laplace-functional equations for f_T = f(·/T)/norm
    LaplaceSolve {
        /// `indicator:LO:HI[:W]` or `zero`
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// default: F_T of the configured model
        #[arg(long)]
        norm: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        cells: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite-T Laplace, CLT convergence and tail-index checks
    Clt,
    /// Compare X_T with the scaled limit process
    Limit {
        /// also write this many full limit paths
        #[arg(long, default_value_t = 0)]
        dump_paths: usize,
    },
    /// Run the acceptance criteria
    Report {
        /// comma-separated criterion numbers (default: all)
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

/// Failure classes mapped to exit codes.
enum Outcome {
    Passed,
    ChecksFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Outcome::Passed) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let g = &cli.global;
    if let Some(n) = g.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("thread pool")?;
    }
    let cfg = match &g.config {
        Some(path) => {
            let mut cfg = ExperimentConfig::load(path)?;
            if let Some(s) = g.seed {
                cfg.seed = s;
            }
            if let Some(d) = &g.out_dir {
                cfg.out_dir = d.clone();
            }
            Some(cfg)
        }
        None => None,
    };
    let out_dir = g
        .out_dir
        .clone()
        .or_else(|| cfg.as_ref().map(|c| c.out_dir.clone()))
        .unwrap_or_else(|| PathBuf::from("out"));
    let need_cfg = || cfg.clone().ok_or_else(|| anyhow!("this subcommand needs --config <file>"));

    match cli.command {
        Command::Simulate {
            horizon,
            replicas,
            count_step,
            no_events,
        } => {
            let cfg = need_cfg()?;
            simulate(&cfg, &out_dir, g.format, horizon, replicas, count_step, no_events)?;
            Ok(Outcome::Passed)
        }
        Command::Resolvent {
            kernel,
            alpha,
            theta,
            dt,
            horizon,
            out,
        } => {
            let spec = resolve_kernel(cfg.as_ref(), kernel, alpha, theta)?;
            let ext = if g.format == Format::Json { "json" } else { "csv" };
            let path = out.unwrap_or_else(|| out_dir.join(format!("resolvent.{ext}")));
            resolvent(&spec, dt, horizon, &path, g.format)?;
            Ok(Outcome::Passed)
        }
        Command::LaplaceSolve { f, scale, norm, cells, out } => {
            let cfg = need_cfg()?;
            let path = out.unwrap_or_else(|| out_dir.join("laplace.json"));
            laplace_solve(&cfg, &f, scale, norm, cells, &path)?;
            Ok(Outcome::Passed)
        }
        Command::Clt => {
            let report = run_clt_experiment(&need_cfg()?)?;
            finish(report, &out_dir.join("clt_report.json"))
        }
        Command::Limit { dump_paths } => {
            let cfg = need_cfg()?;
            let report = run_limit_comparison(&cfg)?;
            if dump_paths > 0 {
                write_limit_paths(&cfg, dump_paths, &out_dir, g.format)?;
            }
            finish(report, &out_dir.join("limit_report.json"))
        }
        Command::Report { only } => {
            let seed = g.seed.or(cfg.as_ref().map(|c| c.seed)).unwrap_or(20_240_601);
            let mut report = Report::new(json!({ "suite": "acceptance", "seed": seed }));
            for (n, _, _) in CRITERIA {
                if only.is_empty() || only.contains(&n) {
                    report.push(run_criterion(n, seed).expect("listed criterion"));
                }
            }
            for c in &report.checks {
                println!("{}", c.line());
            }
            finish(report, &out_dir.join("report.json"))
        }
    }
}

fn finish(report: Report, path: &Path) -> Result<Outcome> {
    report.write(path)?;
    let failed = report.checks.iter().filter(|c| !c.pass).count();
    eprintln!("{} checks, {failed} failed; report written to {}", report.checks.len(), path.display());
    Ok(if failed == 0 { Outcome::Passed } else { Outcome::ChecksFailed })
}

fn resolve_kernel(cfg: Option<&ExperimentConfig>, kernel: Option<String>, alpha: Option<f64>, theta: Option<f64>) -> Result<KernelSpec> {
    let base = cfg.map(|c| c.kernel.clone());
    let variant = kernel
        .or_else(|| base.as_ref().map(|k| k.variant.clone()))
        .ok_or_else(|| anyhow!("give --kernel or --config"))?;
    let alpha = alpha
        .or_else(|| base.as_ref().map(|k| k.alpha))
        .ok_or_else(|| anyhow!("give --alpha or --config"))?;
    let theta = theta.or_else(|| base.as_ref().and_then(|k| k.theta)).unwrap_or(1.0);
    Ok(match variant.to_ascii_lowercase().as_str() {
        "paretotail" | "pareto" => KernelSpec::pareto(alpha)?,
        "mittagleffler" | "ml" => KernelSpec::mittag_leffler(alpha, theta)?,
        "stabledensity" | "stable" => KernelSpec::stable(alpha)?,
        _ => bail!("unknown kernel `{variant}`"),
    })
}

fn create(path: &Path) -> Result<File> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    File::create(path).with_context(|| format!("creating {}", path.display()))
}

/// Rows as CSV (header from the field names) or as a JSON array.
fn write_rows<T: Serialize>(path: &Path, format: Format, rows: &[T]) -> Result<()> {
    let file = create(path)?;
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(file);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => serde_json::to_writer_pretty(file, rows)?,
    }
    Ok(())
}

fn with_ext(dir: &Path, stem: &str, format: Format) -> PathBuf {
    dir.join(format!("{stem}.{}", if format == Format::Json { "json" } else { "csv" }))
}

#[derive(Serialize)]
struct EventRow {
    replica: u64,
    id: u64,
    parent: Option<u64>,
    generation: u32,
    time: f64,
    mark: f64,
}

#[derive(Serialize)]
struct CountRow {
    replica: u64,
    t: f64,
    #[serde(rename = "N")]
    n: u64,
}

fn simulate(cfg: &ExperimentConfig, out_dir: &Path, format: Format, horizon: f64, replicas: usize, count_step: Option<f64>, no_events: bool) -> Result<()> {
    let model = cfg.model()?;
    let step = count_step.unwrap_or(horizon / 100.0);
    if !(step > 0.0) {
        bail!("--count-step must be positive");
    }
    let n = (horizon / step).floor() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|j| j as f64 * step).collect();
    if grid.last().is_some_and(|&t| t < horizon) {
        grid.push(horizon);
    }
    let opts = SimOptions {
        keep_records: !no_events,
        grid,
        ..Default::default()
    };
    let outs = run_replicas(cfg.seed, replicas, |_, rng| simulate_hawkes(cfg.mu, horizon, &model.kernel, &model.marks, &model.law, &opts, rng))?;
    let mut counts = Vec::new();
    let mut events = Vec::new();
    for (r, o) in outs.iter().enumerate() {
        let r = r as u64;
        counts.extend(o.grid.iter().zip(&o.counts).map(|(&t, &n)| CountRow { replica: r, t, n }));
        if let Some(recs) = &o.records {
            let mut recs = recs.clone();
            recs.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.id.cmp(&b.id)));
            events.extend(recs.iter().map(|e| EventRow {
                replica: r,
                id: e.id,
                parent: e.parent,
                generation: e.generation,
                time: e.time,
                mark: e.mark,
            }));
        }
    }
    write_rows(&with_ext(out_dir, "counts", format), format, &counts)?;
    if !no_events {
        write_rows(&with_ext(out_dir, "events", format), format, &events)?;
    }
    eprintln!("{replicas} replicas, {} events, written to {}", events.len(), out_dir.display());
    Ok(())
}

#[derive(Serialize)]
struct ResolventRow {
    k: usize,
    t: f64,
    m: f64,
    r: f64,
    #[serde(rename = "I_R")]
    i_r: f64,
}

fn resolvent(kernel: &KernelSpec, dt: f64, horizon: f64, path: &Path, format: Format) -> Result<()> {
    let n = (horizon / dt).round() as usize;
    let table = build_resolvent(kernel, Grid::new(dt, n)?)?;
    // row k: cell [k dt, (k+1) dt]; I_R at its right edge
    let rows: Vec<ResolventRow> = (0..n)
        .map(|k| ResolventRow {
            k,
            t: (k + 1) as f64 * dt,
            m: table.m[k],
            r: table.r[k],
            i_r: table.i_r[k + 1],
        })
        .collect();
    write_rows(path, format, &rows)?;
    eprintln!("I_R(horizon)/horizon^alpha = {:.6}; written to {}", table.c_alpha_estimate, path.display());
    Ok(())
}

fn laplace_solve(cfg: &ExperimentConfig, f: &str, scale: f64, norm: Option<f64>, cells: usize, path: &Path) -> Result<()> {
    let model = cfg.model()?;
    let f: TestFunction = f.parse()?;
    let norm = norm.unwrap_or_else(|| model.limit.norming(scale));
    let ft = f.rescaled(scale, norm)?;
    let end = ft.support_end().ok_or_else(|| anyhow!("f must have compact support"))?;
    let nl = model.law.nonlinearity(&model.marks);
    let state = if f.is_zero() || end == 0.0 {
        None
    } else {
        Some(solve_g(&ft, &model.kernel, nl.as_ref(), Grid::covering(end, cells)?)?)
    };
    let (exact_mean, log_laplace, centered) = state
        .as_ref()
        .map(|s| (s.mean(cfg.mu), s.log_laplace(cfg.mu), s.centered_log_laplace(cfg.mu)))
        .unwrap_or((0.0, 0.0, 0.0));
    let target = limit_log_laplace(&model.limit, &f)?;
    let rel_error = if target == 0.0 { centered } else { centered / target - 1.0 };
    let out = json!({
        "config": { "seed": cfg.seed, "experiment": cfg.echo(), "f": f.to_string(), "scale": scale, "norm": norm, "cells": cells },
        "exact_mean": exact_mean,
        "log_laplace": log_laplace,
        "centered_log_laplace": centered,
        "target": target,
        "rel_error": rel_error,
    });
    serde_json::to_writer_pretty(create(path)?, &out)?;
    println!("exact_mean = {exact_mean}\nlog_laplace = {log_laplace}\ncentered_log_laplace = {centered}\ntarget = {target}\nrel_error = {rel_error}");
    Ok(())
}

#[derive(Serialize)]
struct PathRow {
    path_id: usize,
    t: f64,
    zeta: f64,
}

fn write_limit_paths(cfg: &ExperimentConfig, count: usize, out_dir: &Path, format: Format) -> Result<()> {
    let model = cfg.model()?;
    let lim = &cfg.limit;
    let n = (lim.tmax / lim.dt).round() as usize;
    let ts: Vec<f64> = (0..=n).map(|j| j as f64 * lim.dt).collect();
    // raw ζ, without the prefactor
    let c = model.limit.prefactor();
    let paths = simulate_scaled_limit(&model.limit, lim.dt, lim.tmax, &ts, count, cfg.seed ^ 0x5eed_0003)?;
    let rows: Vec<PathRow> = paths
        .iter()
        .enumerate()
        .flat_map(|(i, p)| ts.iter().zip(p).map(move |(&t, &zeta)| PathRow { path_id: i, t, zeta: zeta / c }))
        .collect();
    write_rows(&with_ext(out_dir, "limit_paths", format), format, &rows)
}
