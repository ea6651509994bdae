//! Library surface of the `zpflab` command-line runner.
//!
//! The binary is a thin wrapper over [`run_cli`], which parses arguments,
//! dispatches the requested scenario, and maps errors onto the documented
//! exit codes. All numerical work happens in `zpflab-core`; this crate only
//! parses configuration, composes core operations, and writes artifacts.

pub mod config;
pub mod manifest;
pub mod scenarios;
pub mod textio;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use thiserror::Error;

use zpflab_core::CoreError;

/// Exit codes of the binary.
pub mod exit_code {
    /// All requested work done, every enabled check passed.
    pub const OK: i32 = 0;
    /// The run completed but at least one check failed.
    pub const CHECK_FAILED: i32 = 1;
    /// Command line or configuration file could not be parsed.
    pub const PARSE: i32 = 2;
    /// Configuration parsed but is invalid or incomplete.
    pub const VALIDATION: i32 = 3;
    /// The numerical integration lost stability.
    pub const DIVERGENCE: i32 = 4;
    /// Filesystem or other environment failure.
    pub const ENVIRONMENT: i32 = 10;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("numerical divergence: {0}")]
    Divergence(String),
    #[error("environment error: {0}")]
    Environment(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Divergence(msg) => CliError::Divergence(msg),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Environment(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => exit_code::PARSE,
            CliError::Validation(_) => exit_code::VALIDATION,
            CliError::Divergence(_) => exit_code::DIVERGENCE,
            CliError::Environment(_) => exit_code::ENVIRONMENT,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "zpflab",
    version,
    about = "Zero-point-field oscillator laboratory: sampling, simulation, response analysis, verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Plain-text configuration with dotted keys (`spectrum.n_modes = 4096`).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory for artifacts and the manifest.
    #[arg(long, default_value = "runs/out")]
    pub out: PathBuf,
    /// Master seed; overrides `seed` from the configuration file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Suppress progress output on stdout.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Manifest files produced by earlier runs.
    #[arg(required = true)]
    pub manifests: Vec<PathBuf>,
    /// Output directory for the consolidated table.
    #[arg(long, default_value = "runs/report")]
    pub out: PathBuf,
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a zero-point field realization and validate its correlation.
    FieldSample(RunArgs),
    /// Integrate a driven-oscillator ensemble and compare with the
    /// stationary quadrature oracle.
    Simulate(RunArgs),
    /// Susceptibility scan, Kramers-Kronig reconstruction, and causality.
    Response(RunArgs),
    /// Solve the stationary eigenproblem and export transition data.
    Oracle(RunArgs),
    /// Run the matrix-mechanics verification battery.
    Verify(RunArgs),
    /// Consolidate manifests from previous runs into one table.
    Report(ReportArgs),
}

/// Configure the global thread pool from `ZPFLAB_THREADS`, if set.
fn init_threads() {
    if let Ok(v) = std::env::var("ZPFLAB_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n >= 1 {
                // Ignore the error if a pool was already installed.
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

/// Run the CLI against parsed arguments; returns the process exit code.
pub fn run_cli(cli: Cli) -> i32 {
    init_threads();
    let outcome = match cli.command {
        Command::FieldSample(args) => scenarios::run_scenario("field-sample", &args),
        Command::Simulate(args) => scenarios::run_scenario("simulate", &args),
        Command::Response(args) => scenarios::run_scenario("response", &args),
        Command::Oracle(args) => scenarios::run_scenario("oracle", &args),
        Command::Verify(args) => scenarios::run_scenario("verify", &args),
        Command::Report(args) => scenarios::report::run(&args),
    };
    match outcome {
        Ok(all_passed) => {
            if all_passed {
                exit_code::OK
            } else {
                exit_code::CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("zpflab: {e}");
            e.exit_code()
        }
    }
}
