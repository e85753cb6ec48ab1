//! `alohak` — evaluate, optimize, and simulate message-delivery
//! probabilities for slotted random multiple access with retransmissions.

mod commands;
mod config;
mod output;
mod params;

use clap::{Parser, Subcommand};
use std::fmt;
use std::process::ExitCode;

/// Exit codes: 0 ok, 1 I/O or internal, 2 usage or domain error, 3 root
/// solver did not converge (with --newton), 4 statistical check failed.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Solver(String),
    StatFail,
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Solver(msg) => write!(f, "{msg}"),
            CliError::StatFail => write!(f, "statistical check failed at the 3-sigma level"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Solver(_) => 3,
            CliError::StatFail => 4,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<alohak_core::ModelError> for CliError {
    fn from(e: alohak_core::ModelError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<alohak_core::OptimizerError> for CliError {
    fn from(e: alohak_core::OptimizerError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<alohak_core::SimError> for CliError {
    fn from(e: alohak_core::SimError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "alohak",
    version,
    about = "Delivery probabilities and optimal retransmission counts for slotted random access",
    after_help = "Values come from closed forms unless a command says otherwise; \
                  `simulate` cross-checks them by Monte Carlo. Option values may also \
                  be supplied by a key=value file via --config; explicit flags win."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate delivery probabilities over a range of retransmission counts
    Eval(commands::eval::EvalArgs),
    /// Find the optimal retransmission count K*
    Optimize(commands::optimize::OptimizeArgs),
    /// Partition the (epsilon, lambda) plane into optimal-K regions
    Regions(commands::regions::RegionsArgs),
    /// Run a seeded Monte Carlo and compare it with the closed forms
    Simulate(commands::simulate::SimulateArgs),
    /// Reproduce the bundled reference scenarios and their figure data
    Examples(commands::examples::ExamplesArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(args) => commands::eval::run(args),
        Command::Optimize(args) => commands::optimize::run(args),
        Command::Regions(args) => commands::regions::run(args),
        Command::Simulate(args) => commands::simulate::run(args),
        Command::Examples(args) => commands::examples::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("alohak: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
