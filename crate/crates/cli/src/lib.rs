//! Batch driver behind the `segal-quant` binary: reads a JSON run config,
//! runs one command and returns a JSON report.

pub mod commands;
pub mod config;
pub mod report;

use std::time::Instant;

use segal_core::SegalError;

pub use config::{parse_config, RunConfig};
pub use report::{Entry, Report, REPORT_VERSION};

/// Tolerance used when neither the config nor the environment sets one.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Environment variable that replaces [`DEFAULT_TOLERANCE`].
pub const TOLERANCE_ENV: &str = "SEGAL_QUANT_TOL";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
}

impl From<SegalError> for CliError {
    fn from(e: SegalError) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Verify,
    Uniqueness,
    Evolve,
    Fock,
    DomainCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Uniqueness => "uniqueness",
            Command::Evolve => "evolve",
            Command::Fock => "fock",
            Command::DomainCheck => "domain-check",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Options {
    pub full_matrices: bool,
    pub seed: Option<u64>,
    pub default_tolerance: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            full_matrices: false,
            seed: None,
            default_tolerance: DEFAULT_TOLERANCE,
        }
    }
}

pub fn run(command: Command, config_text: &str, opts: &Options) -> Result<Report, CliError> {
    let config = parse_config(config_text)?;
    run_config(command, &config, opts)
}

pub fn run_config(command: Command, config: &RunConfig, opts: &Options) -> Result<Report, CliError> {
    let echo = serde_json::to_value(config).expect("config serializes");
    let mut report = Report::new(command.name(), echo, opts.full_matrices);
    let start = Instant::now();
    match command {
        Command::Verify => commands::cmd_verify(config, opts, &mut report)?,
        Command::Uniqueness => commands::cmd_uniqueness(config, opts, &mut report)?,
        Command::Evolve => commands::cmd_evolve(config, opts, &mut report)?,
        Command::Fock => commands::cmd_fock(config, opts, &mut report)?,
        Command::DomainCheck => commands::cmd_domain_check(config, opts, &mut report)?,
    }
    report.timing("total", start.elapsed().as_secs_f64());
    Ok(report)
}
