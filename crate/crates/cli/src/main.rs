//! `rcsb`: fit fidelity models, validate simulators and map the
//! quantum/classical frontier from the command line.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CircuitGenArgs, ExtrapolateArgs, FitArgs, FrontierArgs, SimulateArgs, ValidateArgs};
use config::resolve;
use error::CliResult;

/// Settings come from `--config` (a JSON object whose keys are the flag
/// names with `_` for `-`) and are overridden by flags. Every output file
/// must be named; stdout carries one summary JSON line.
///
/// Exit status: 0 success, 2 configuration error, 3 resource limit,
/// 4 numeric failure.
#[derive(Parser, Debug)]
#[command(name = "rcsb", version)]
struct Cli {
    /// JSON run configuration for the chosen command.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Least-squares fit of λ, γ to a fidelity dataset.
    Fit(FitArgs),
    /// End-to-end XEB and SFA checks on random circuits.
    Validate(ValidateArgs),
    /// Classify the (n, m) plane and export the map and contours.
    Frontier(FrontierArgs),
    /// Project the error scale ε to a target year from an error trend.
    Extrapolate(ExtrapolateArgs),
    /// Generate a random grid circuit.
    CircuitGen(CircuitGenArgs),
    /// Simulate a circuit file and dump its amplitudes.
    Simulate(SimulateArgs),
}

fn run(cli: Cli) -> CliResult<serde_json::Value> {
    let config = cli.config.as_deref();
    match cli.command {
        Command::Fit(a) => commands::cmd_fit(resolve(&a, config)?),
        Command::Validate(a) => commands::cmd_validate(resolve(&a, config)?),
        Command::Frontier(a) => commands::cmd_frontier(resolve(&a, config)?),
        Command::Extrapolate(a) => commands::cmd_extrapolate(resolve(&a, config)?),
        Command::CircuitGen(a) => commands::cmd_circuit_gen(resolve(&a, config)?),
        Command::Simulate(a) => commands::cmd_simulate(resolve(&a, config)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {:#}", e.error);
            ExitCode::from(e.kind.exit_code())
        }
    }
}
