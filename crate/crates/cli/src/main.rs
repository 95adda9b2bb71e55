//! `owisac`: experiment runner for the capacity, envelope-design and FMCW
//! sensing models. Each subcommand writes CSV artifacts (and optional SVG
//! plots) into `--out`.
//!
//! Exit status: 0 on success, 1 on a configuration error, 2 when a solver
//! fails to converge, 3 on I/O or other failures.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod error;
mod experiments;
mod output;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::Config;
use crate::error::CliError;
use crate::experiments::SensingMetric;
use crate::output::{write_file, Units};

#[derive(Debug, Parser)]
#[command(
    name = "owisac",
    version,
    about = "Capacity bounds, envelope design and FMCW sensing experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration file; defaults apply to every missing key.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Overrides `run.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides `run.trials`.
    #[arg(long, global = true)]
    trials: Option<usize>,

    /// Write entropies and rates in bits instead of nats.
    #[arg(long, global = true)]
    bits: bool,

    /// Also write an SVG line plot per CSV.
    #[arg(long, global = true)]
    plot: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Solve the max-entropy envelope law for one or more thresholds.
    Maxent,
    /// Design PAM envelopes (low-SNR two-level and max-entropy M-PAM).
    Pam,
    /// Capacity bounds, asymptotes and PAM rates over an SNR grid.
    CapacityCurve,
    /// CDFs of the max-entropy law and its PAM approximations.
    Cdf,
    /// Monte-Carlo beat-recovery MSE over a sensing-SNR grid.
    SimulateMse,
    /// Monte-Carlo range and velocity RMSE over a sensing-SNR grid.
    SimulateRmse,
    /// Asymptotic gap versus NSP.
    TradeoffHigh,
    /// Maximum input variance versus NSP.
    TradeoffLow,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Maxent => "maxent",
            Command::Pam => "pam",
            Command::CapacityCurve => "capacity-curve",
            Command::Cdf => "cdf",
            Command::SimulateMse => "simulate-mse",
            Command::SimulateRmse => "simulate-rmse",
            Command::TradeoffHigh => "tradeoff-high",
            Command::TradeoffLow => "tradeoff-low",
        }
    }
}

fn load_config(cli: &Cli) -> Result<Config, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            Config::parse(&text).map_err(|e| match e {
                CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
                other => other,
            })?
        }
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.run.seed = seed;
    }
    if let Some(trials) = cli.trials {
        cfg.run.trials = trials;
    }
    cfg.run.bits |= cli.bits;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let cfg = load_config(cli)?;
    let outcome = match cli.command {
        Command::Maxent => experiments::maxent(&cfg),
        Command::Pam => experiments::pam(&cfg),
        Command::CapacityCurve => experiments::capacity_curve(&cfg),
        Command::Cdf => experiments::cdf(&cfg),
        Command::SimulateMse => experiments::simulate(&cfg, SensingMetric::Mse),
        Command::SimulateRmse => experiments::simulate(&cfg, SensingMetric::Rmse),
        Command::TradeoffHigh => experiments::tradeoff_high(&cfg),
        Command::TradeoffLow => experiments::tradeoff_low(&cfg),
    }?;

    std::fs::create_dir_all(&cli.out).map_err(|source| CliError::Io {
        path: cli.out.display().to_string(),
        source,
    })?;
    let units = Units { bits: cfg.run.bits };
    let resolved = cfg.to_toml();
    let mut written = Vec::new();
    for art in &outcome.artifacts {
        let path = cli.out.join(format!("{}.csv", art.stem));
        write_file(&path, &art.table.render(cli.command.name(), units, &resolved))?;
        written.push(path.display().to_string());
        if cli.plot {
            for (stem, plot) in &art.plots {
                let path = cli.out.join(format!("{stem}.svg"));
                write_file(&path, &plot.render())?;
                written.push(path.display().to_string());
            }
        }
    }
    Ok(format!(
        "{}: {} points computed, {} infeasible skipped; wrote {}",
        cli.command.name(),
        outcome.points,
        outcome.infeasible,
        written.join(", ")
    ))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("owisac {}: {e}", cli.command.name());
            ExitCode::from(e.exit_code())
        }
    }
}
