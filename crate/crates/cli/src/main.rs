//! `kpzlab`: PNG and Dyson simulations, kernel evaluation, Tracy–Widom and
//! Airy₂ tables, and statistical comparison of the results.

mod compare;
mod error;
mod grid;
mod kernel;
mod output;
mod simulate;
mod tables;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;

use crate::error::{CliError, CliResult, EXIT_CONFIG};
use crate::output::Run;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Tier {
    /// Small sizes and loose bands, minutes on one core.
    Ci,
    /// Sizes used for the published figures.
    Paper,
}

#[derive(Debug, Parser)]
#[command(name = "kpzlab", version, about = "KPZ edge statistics: PNG growth, Dyson Brownian motion, Fredholm determinants")]
struct Cli {
    /// JSON run configuration; without it the tier preset is used.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory. Nothing is written outside it.
    #[arg(long, global = true, default_value = "kpzlab-out")]
    out: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for the parallel batch.
    #[arg(long, global = true, env = "KPZLAB_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Tier::Ci)]
    tier: Tier,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Png,
    Dyson,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo batch of PNG heights or GUE/Dyson spectra.
    Simulate {
        #[arg(value_enum)]
        target: Target,
    },
    /// Evaluate a correlation kernel on a grid.
    Kernel(kernel::KernelArgs),
    /// Tabulate F1, F2 and F4.
    Tw(tables::TwArgs),
    /// Two-time structure function and covariance of the Airy2 process.
    AiryStats(tables::AiryStatsArgs),
    /// Compare a CSV output with the limit laws and write a JSON report.
    Compare(compare::CompareArgs),
}

/// Flags shared by every subcommand.
pub struct Common {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub tier: Tier,
}

impl Common {
    pub fn load_config_or<T: DeserializeOwned>(&self, preset: impl FnOnce() -> T) -> CliResult<T> {
        match &self.config {
            None => Ok(preset()),
            Some(path) => load_config(path),
        }
    }

    /// Opens the output directory; the config digest is taken over the
    /// compact JSON echo, so it does not depend on the input file's layout.
    pub fn start_run(&self, echo: &serde_json::Value, seed: Option<u64>) -> CliResult<Run> {
        Run::start(&self.out, echo.to_string().as_bytes(), seed)
    }
}

fn load_config<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io("CONFIG_NOT_FOUND", path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::config("CONFIG_PARSE", format!("{}: {e}", path.display())))
}

fn configure_threads(threads: Option<usize>) -> CliResult<()> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(CliError::config("CONFIG_INVALID", "--threads must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config("CONFIG_INVALID", e.to_string()))
}

fn dispatch(cli: Cli) -> CliResult<()> {
    configure_threads(cli.threads)?;
    let common = Common { config: cli.config, out: cli.out, seed: cli.seed, tier: cli.tier };
    match &cli.command {
        Command::Simulate { target: Target::Png } => simulate::png(&common),
        Command::Simulate { target: Target::Dyson } => simulate::dyson(&common),
        Command::Kernel(a) => kernel::run(&common, a),
        Command::Tw(a) => tables::tw(&common, a),
        Command::AiryStats(a) => tables::airy_stats(&common, a),
        Command::Compare(a) => compare::run(&common, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::config("USAGE", e.kind().to_string() + ": " + e.to_string().trim());
            eprintln!("{}", err.to_json());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit)
        }
    }
}
