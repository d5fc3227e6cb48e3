//! `ducg`: diagnosis runs, model generation, and benchmark sweeps.
//!
//! Exit codes: 0 success, 1 usage, 2 load/validation failure, 3 infeasible
//! run (enumeration cap, recursion term cap, or layered assumptions), 4
//! sampling did not converge within the cycle cap.

mod bench;
mod generate;
mod infer;
mod report;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;
pub const EXIT_NOT_CONVERGED: u8 = 4;

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }

    pub fn infeasible(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INFEASIBLE,
            message: message.into(),
        }
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::validation(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "ducg",
    about = "Inference on Dynamic Uncertain Causality Graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank root-cause hypotheses for a graph under evidence
    Infer(infer::InferArgs),
    /// Write a generated model as a graph document
    Generate(generate::GenerateArgs),
    /// Sweep the scaling family and compare backend wall time and accuracy
    Bench(bench::BenchArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with successful exit
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(EXIT_USAGE);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let result = match cli.command {
        Command::Infer(args) => infer::run(args),
        Command::Generate(args) => generate::run(args),
        Command::Bench(args) => bench::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
