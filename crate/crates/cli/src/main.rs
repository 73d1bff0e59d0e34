//! `pird`: fit VAR models, decompose their mutual information rate, and
//! reproduce the benchmark sweeps.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pird::PirdError;

use config::CommonArgs;

#[derive(Parser)]
#[command(name = "pird", version, about = "Partial information rate decomposition for VAR processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a VAR model to a CSV time series (AIC order selection unless --order).
    Fit(CommonArgs),
    /// Decompose the information rate from a target to its sources.
    Decompose(CommonArgs),
    /// Reproduce a benchmark: c sweep for sim1/sim2, band table for sim3.
    Bench(CommonArgs),
    /// Write a simulated benchmark realization as CSV.
    Simulate(CommonArgs),
}

fn exit_code(e: &PirdError) -> u8 {
    match e {
        PirdError::Argument(_) => 2,
        PirdError::Format(_) => 3,
        PirdError::Numerical(_) | PirdError::Instability(_) | PirdError::Estimation(_) => 4,
        PirdError::Capability(_) => 5,
        PirdError::Io(_) => 6,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(a) => a.resolve().and_then(commands::cmd_fit),
        Command::Decompose(a) => a.resolve().and_then(commands::cmd_decompose),
        Command::Bench(a) => a.resolve().and_then(commands::cmd_bench),
        Command::Simulate(a) => a.resolve().and_then(commands::cmd_simulate),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pird: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
