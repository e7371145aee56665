//! `rpm` — resonances of polynomial multiple-well oscillators from Hankel
//! determinant sequences, at user-selected precision.

mod config;
mod oracle_check;
mod output;
mod reproduce;
mod solve;

use clap::{Parser, Subcommand};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_ORACLE_FAILURE: i32 = 3;

#[derive(Parser)]
#[command(
    name = "rpm",
    version,
    about = "Real and complex eigenvalues of multiple-well oscillators",
    long_about = "Locates eigenvalues (including resonances with tiny imaginary \
parts) of even polynomial oscillators as converging root sequences of Hankel \
determinants built from the series of the regularized logarithmic derivative."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for one eigenvalue, or sweep a list of couplings
    Solve(solve::SolveArgs),
    /// Re-emit a built-in reference table, optionally diffing against it
    Reproduce(reproduce::ReproduceArgs),
    /// Run the independent verification suites
    OracleCheck(oracle_check::OracleArgs),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // keep clap's rendering but fold all usage problems onto exit 1,
            // except --help/--version which are successes
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match cli.command {
        Command::Solve(args) => solve::run(args),
        Command::Reproduce(args) => reproduce::run(args),
        Command::OracleCheck(args) => oracle_check::run(args),
    };
    let code = match code {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}", e);
            EXIT_USAGE
        }
    };
    std::process::exit(code);
}
