//! Command-line front end for weighted multi-view NMF experiments.
//!
//! Subcommands: `fit` (factorize a manifest-described dataset and emit
//! machine-readable results), `synth` (generate the synthetic presets to
//! CSV), `bounds` (evaluate the generalization-bound calculators), `probe`
//! (perturbation / sparsity / monotonicity / scaling studies), and
//! `baseline` (k-means reference points for comparison).
//!
//! Exit codes: 0 on success, 2 for input problems (bad flags, unreadable or
//! malformed files, invalid specs), 3 for computation failures reported by
//! the solver or probes.

mod commands;
mod manifest;
mod output;

use clap::{Parser, Subcommand};

use commands::{baseline, bounds, fit, probe, synth};

/// Weighted multi-view nonnegative matrix factorization experiments.
#[derive(Parser)]
#[command(name = "wmnmf", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factorize a multi-view dataset and write results.json, weights.csv,
    /// and labels.csv to the output directory.
    Fit(fit::FitArgs),
    /// Generate a synthetic preset (or spec file) as CSV views plus a
    /// manifest that `fit` can consume directly.
    Synth(synth::SynthArgs),
    /// Print both generalization bounds with their per-term decomposition.
    Bounds(bounds::BoundsArgs),
    /// Run a study probe and print its CSV report.
    #[command(subcommand)]
    Probe(probe::ProbeCommand),
    /// Score concatenated and per-view k-means references on a labeled
    /// dataset.
    Baseline(baseline::BaselineArgs),
}

/// Failure category deciding the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable, unparsable, or invalid input; exits with code 2.
    Input(String),
    /// The solver or a probe failed mid-computation; exits with code 3.
    Computation(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Computation(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(msg) | CliError::Computation(msg) => msg,
        }
    }
}

/// Maps an error raised while loading or validating inputs.
pub fn input_error(err: impl std::fmt::Display) -> CliError {
    CliError::Input(err.to_string())
}

/// Maps an error raised after inputs were accepted.
pub fn computation_error(err: impl std::fmt::Display) -> CliError {
    CliError::Computation(err.to_string())
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(args) => fit::run(args),
        Command::Synth(args) => synth::run(args),
        Command::Bounds(args) => bounds::run(args),
        Command::Probe(command) => probe::run(command),
        Command::Baseline(args) => baseline::run(args),
    };
    if let Err(err) = result {
        eprintln!("error: {}", err.message());
        std::process::exit(err.exit_code());
    }
}
