//! `frep`: command-line interface to the free-group representation
//! laboratory.
//!
//! Exit codes: 0 success, 1 assertion-grade failure (violated numeric
//! invariant), 2 input error (malformed file, missing field, bad
//! argument).

use clap::{Parser, Subcommand};
use frep_cli::cmd;

#[derive(Parser, Debug)]
#[command(
    name = "frep",
    version,
    about = "Numerical laboratory for unitary representations of free groups",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Group-algebra arithmetic.
    #[command(subcommand)]
    Algebra(cmd::algebra::AlgebraCmd),
    /// Representation construction and comparison.
    #[command(subcommand)]
    Rep(cmd::rep::RepCmd),
    /// Irreducibility analysis.
    #[command(subcommand)]
    Irr(cmd::irr::IrrCmd),
    /// Regular-representation norm bounds.
    #[command(subcommand)]
    Norm(cmd::norm::NormCmd),
    /// Experiment harnesses.
    #[command(subcommand)]
    Lab(cmd::lab::LabCmd),
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Algebra(c) => cmd::algebra::run(c),
        Command::Rep(c) => cmd::rep::run(c),
        Command::Irr(c) => cmd::irr::run(c),
        Command::Norm(c) => cmd::norm::run(c),
        Command::Lab(c) => cmd::lab::run(c),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code);
    }
}
