//! `erratic`: analytic queries, single runs and experiment sweeps.
//!
//! Exit codes: 0 success, 1 bad input, 2 internal failure.

mod analytic;
mod error;
mod experiment;
mod manifest;
mod sim;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "erratic", version, about = "Erratic-extremist gathering simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a closed-form quantity.
    Analytic(analytic::AnalyticArgs),
    /// Run the one-dimensional process once and write its trajectory.
    Sim1d(sim::Sim1dArgs),
    /// Run the planar process once and write its trajectory.
    Sim2d(sim::Sim2dArgs),
    /// Run a Monte Carlo experiment from a JSON spec.
    Experiment(experiment::ExperimentArgs),
}


fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analytic(a) => analytic::run(a),
        Command::Sim1d(a) => sim::run_1d(a),
        Command::Sim2d(a) => sim::run_2d(a),
        Command::Experiment(a) => experiment::run(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
        Err(_) => ExitCode::from(2),
    }
}
