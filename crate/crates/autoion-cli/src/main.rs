//! Command-line front end: spectrum, evolve, zeros and sweep workflows over
//! a single JSON run configuration.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical error.

mod config;
mod output;
mod workflows;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use config::{Format, Mode};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(autoion::Error),
}

#[derive(Parser)]
#[command(
    name = "autoion",
    version,
    about = "Photoelectron spectra and spectral zeros of a driven autoionizing system with a neighbor two-level atom"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides output.dir from the config)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv | json | both (overrides output.format)
    #[arg(long)]
    format: Option<String>,
    /// Worker threads for grid and sweep evaluation
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Integrate the discretized-continuum dynamics and emit comparison
    /// columns with a per-time L2 error summary
    #[arg(long)]
    oracle: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Long-time spectrum decomposition on an energy grid
    Spectrum(CommonArgs),
    /// Finite-time spectra at the configured instants
    Evolve(EvolveArgs),
    /// Persistent, weak-pump and dynamical spectral zeros
    Zeros(CommonArgs),
    /// Dynamical-zero trajectories across a pump-strength sweep
    Sweep(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, common, oracle) = match &cli.command {
        Command::Spectrum(c) => (Mode::Spectrum, c, false),
        Command::Evolve(e) => (Mode::Evolve, &e.common, e.oracle),
        Command::Zeros(c) => (Mode::Zeros, c, false),
        Command::Sweep(c) => (Mode::Sweep, c, false),
    };
    match run(mode, common, oracle) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numeric(e)) => {
            eprintln!("numerical error: {e}");
            ExitCode::from(3)
        }
    }
}

fn run(mode: Mode, common: &CommonArgs, oracle: bool) -> Result<(), CliError> {
    if let Some(n) = common.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let format = match &common.format {
        Some(s) => Some(Format::parse(s)?),
        None => None,
    };
    let raw = config::load(&common.config)?;
    let resolved = config::resolve(&raw, mode, common.out.clone(), format)?;
    match mode {
        Mode::Spectrum => workflows::cmd_spectrum(&resolved),
        Mode::Evolve => workflows::cmd_evolve(&resolved, oracle),
        Mode::Zeros => workflows::cmd_zeros(&resolved),
        Mode::Sweep => workflows::cmd_sweep(&resolved),
    }
}
