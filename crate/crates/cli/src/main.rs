use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use segal_cli::{run, CliError, Command, Options, DEFAULT_TOLERANCE, TOLERANCE_ENV};

/// Construct, verify and stress-test unitary realizations of harmonic oscillator systems.
#[derive(Parser)]
#[command(name = "segal-quant", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Build the realization and check every structural axiom
    Verify(Args),
    /// Re-derive the structure by a seeded multi-start scan
    Uniqueness(Args),
    /// Evolve a state and log the conserved quantities
    Evolve(Args),
    /// Build the truncated Fock space and check the lifted dynamics
    Fock(Args),
    /// Check the weighted-domain conditions for the flow
    DomainCheck(Args),
}

#[derive(clap::Args)]
struct Args {
    /// JSON run config
    #[arg(long)]
    config: PathBuf,
    /// Include matrices larger than 64x64 in the report
    #[arg(long)]
    full_matrices: bool,
    /// Seed for the uniqueness scan; overrides the config
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Tolerance used when the config does not set one
    #[arg(long, env = TOLERANCE_ENV, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
}

fn execute(command: Command, args: &Args) -> Result<bool, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.config.display())))?;
    let opts = Options {
        full_matrices: args.full_matrices,
        seed: args.seed,
        default_tolerance: args.tolerance,
    };
    let report = run(command, &text, &opts)?;
    let json = report.to_json();
    match &args.out {
        Some(path) => std::fs::write(path, json + "\n")
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => println!("{json}"),
    }
    eprint!("{}", report.summary());
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match &cli.command {
        Sub::Verify(a) => (Command::Verify, a),
        Sub::Uniqueness(a) => (Command::Uniqueness, a),
        Sub::Evolve(a) => (Command::Evolve, a),
        Sub::Fock(a) => (Command::Fock, a),
        Sub::DomainCheck(a) => (Command::DomainCheck, a),
    };
    match execute(command, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
