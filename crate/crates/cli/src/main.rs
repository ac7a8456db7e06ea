//! `tripod`: simulate, sweep and reproduce the figure datasets.

mod commands;
mod figures;
mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::settings::ConfigFile;

#[derive(Debug, Parser)]
#[command(
    name = "tripod",
    version,
    about = "Dephasing in tripod adiabatic passage"
)]
struct Cli {
    /// Flat key = value file; flags take precedence over it
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one trajectory and write it as CSV
    Simulate(commands::SimulateArgs),
    /// Final fidelity and transition time over a gamma or tau grid
    Sweep(commands::SweepArgs),
    /// Write the datasets behind the figures
    Figures(figures::FiguresArgs),
    /// Recompute the adiabatic constants c_s and c_u
    Constants,
}

/// Failure classes; each maps to one exit code.
#[derive(Debug)]
pub enum CliError {
    /// Constants out of tolerance.
    Tolerance(String),
    /// Bad flags, config or input files.
    Usage(String),
    /// Integrator or engine failure.
    Engine(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Tolerance(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Engine(_) | CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Tolerance(m) | CliError::Usage(m) | CliError::Engine(m) | CliError::Io(m) => {
                m
            }
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("TRIPOD_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "TRIPOD_THREADS must be a positive integer, got '{value}'"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Engine(format!("cannot start thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Simulate(args) => commands::simulate(&args, &file),
        Command::Sweep(args) => commands::sweep(&args, &file),
        Command::Figures(args) => figures::run(&args, &file),
        Command::Constants => commands::constants(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap exits 2 on usage errors and 0 for --help
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
