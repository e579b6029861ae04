//! `segal-lab`: command-line front end for the entropy lab.

// `!(x <= tol)` is deliberate: NaN must fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod construct;
mod matrix_demo;
mod output;
mod semicont;
mod spectral;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("contract violation: {0}")]
    Contract(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Contract(_) => 2,
        }
    }
}

pub fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Kv,
}

#[derive(Debug, Parser)]
#[command(name = "segal-lab", version, about = "Segal entropy lab: spectral densities, regularizations, constructions and matrix checks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Output layout.
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,
    /// Tail terms summed directly before the analytic remainder.
    #[arg(long, default_value_t = 1_000_000, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub cutoff: u64,
    /// Write the main output here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Entropy report of a spectral density.
    Entropy(spectral::EntropyArgs),
    /// τ(f_{m,M}(h)) with the quadrature oracle and the Lipschitz modulus.
    Regularize(spectral::RegularizeArgs),
    /// τ(f_{1/M,M}(h)) over a grid of M.
    Sweep(spectral::SweepArgs),
    /// Per-n semicontinuity bound rows for an experiment file.
    Semicont(semicont::SemicontArgs),
    /// Run a construction and write the resulting density.
    Construct(construct::ConstructArgs),
    /// Randomized checks in weighted matrix algebras.
    MatrixDemo(matrix_demo::MatrixDemoArgs),
    /// Parse and validate a density, experiment or matrix file.
    Validate(spectral::ValidateArgs),
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SEGAL_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Input(format!("SEGAL_LAB_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(input)
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let g = &cli.global;
    let text = match cli.command {
        Command::Entropy(a) => spectral::entropy(g, &a)?,
        Command::Regularize(a) => spectral::regularize(g, &a)?,
        Command::Sweep(a) => spectral::sweep(g, &a)?,
        Command::Semicont(a) => return semicont::run(g, &a),
        Command::Construct(a) => return construct::run(g, &a),
        Command::MatrixDemo(a) => return matrix_demo::run(g, &a),
        Command::Validate(a) => spectral::validate(g, &a)?,
    };
    output::emit(g, &text)
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("segal-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
