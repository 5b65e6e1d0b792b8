//! `nsfk`: command-line driver for the verification pipelines.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage
//! and configuration errors. `NSFK_THREADS` caps the worker threads.

mod commands;
mod config;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::RunConfig;
use report::Report;

/// Error caused by the invocation or the configuration rather than by a check.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Parser)]
#[command(
    name = "nsfk",
    version,
    about = "Verification pipelines for the heat-conducting Korteweg fluid"
)]
struct Cli {
    /// TOML configuration; reference values when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory for CSV files and reports.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for randomized checks; overrides the config.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Suppress the text report on stdout.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Closure hypotheses and entropy-pair certificate.
    VerifyThermo,
    /// Coupling, symmetrizer, compensating matrix and spectral bound.
    AnalyzeSymbol,
    /// Linear decay rates from exact modal evolution.
    LinearDecay,
    /// Nonlinear pseudo-spectral run with conservation and decay checks.
    NonlinearRun,
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("NSFK_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| UsageError(format!("NSFK_THREADS: not a thread count: {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<Report> {
    configure_threads()?;
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("nsfk-out"));
    cfg.output = Some(out.clone());
    std::fs::create_dir_all(&out)
        .map_err(|e| UsageError(format!("cannot create {}: {e}", out.display())))?;
    let mut report = dispatch(cli.command, &cfg, &out)?;
    report.write(&out)?;
    report::emit(&report, cli.quiet)?;
    Ok(report)
}

fn dispatch(command: Command, cfg: &RunConfig, out: &Path) -> Result<Report> {
    match command {
        Command::VerifyThermo => commands::thermo::run(cfg, out),
        Command::AnalyzeSymbol => commands::symbol::run(cfg, out),
        Command::LinearDecay => commands::linear::run(cfg, out),
        Command::NonlinearRun => commands::nonlinear::run(cfg, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(r) if r.passed => ExitCode::SUCCESS,
        Ok(r) => {
            for c in r.failures() {
                eprintln!("failed: {}", c.name);
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
