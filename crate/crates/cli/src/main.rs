//! `adia`: sweep, fit, validate, and analyze adiabatic-search error curves.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use adia_core::validate::Level;
use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use commands::{cmd_crossover, cmd_fit, cmd_schedule_dump, cmd_sweep, cmd_validate, resolve_workers};
use config::RunConfig;

#[derive(Parser)]
#[command(name = "adia", version, about = "Adiabatic quantum search: exact error curves, bounds, and regime fits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep delta_ad(1) over the configured JT grid and write the curve CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Override the configured curve output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker count (0 = auto); defaults to ADIA_WORKERS, then the config.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Fit the exponential / polynomial regimes of a curve CSV.
    Fit {
        curve: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the cross-module invariant suite.
    Validate {
        #[arg(long, default_value = "fast")]
        level: String,
    },
    /// Analytic crossover JT*, plus the empirical one when a curve is given.
    Crossover {
        #[arg(long)]
        config: PathBuf,
        curve: Option<PathBuf>,
    },
    /// Print x1, x2, gap, h_A, and ||H|| on a uniform tau grid.
    ScheduleDump {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: &PathBuf) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    RunConfig::parse(&text)
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Sweep { config, out, workers } => {
            let cfg = load_config(&config)?;
            let workers = resolve_workers(workers, cfg.workers)?;
            cmd_sweep(&cfg, out, workers)
        }
        Command::Fit { curve, out } => cmd_fit(&curve, out),
        Command::Validate { level } => {
            let level = match level.as_str() {
                "fast" => Level::Fast,
                "full" => Level::Full,
                other => bail!("config error: level must be 'fast' or 'full', got '{other}'"),
            };
            cmd_validate(level)
        }
        Command::Crossover { config, curve } => {
            let cfg = load_config(&config)?;
            cmd_crossover(&cfg, curve.as_deref())
        }
        Command::ScheduleDump { config, out } => {
            let cfg = load_config(&config)?;
            cmd_schedule_dump(&cfg, out)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
