//! `bernstein`: kernel tables, Gaussian laws, path samples and the
//! verification report from the command line.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "bernstein",
    version,
    about = "Gaussian Bernstein processes of the harmonic oscillator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form kernel against its Hermite series on a square point grid.
    Kernel(RunArgs),
    /// Mean, covariance and precision of a process on a time grid.
    Law(RunArgs),
    /// Sampled paths in long format.
    Sample(RunArgs),
    /// Run every identity check; exits nonzero if any fails.
    Verify(RunArgs),
    /// Mixture weights by multi-index.
    Weights(RunArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Kernel(_) => "kernel",
            Command::Law(_) => "law",
            Command::Sample(_) => "sample",
            Command::Verify(_) => "verify",
            Command::Weights(_) => "weights",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Kernel(a) | Command::Law(a) | Command::Sample(a) | Command::Verify(a) | Command::Weights(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessArg {
    Stationary,
    Pinned,
    Reversed,
    Bridge,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerArg {
    Exact,
    Ou,
    Periodic,
}

/// Every option of every subcommand; the full set is echoed into the output
/// metadata so a file records the run that produced it.
#[derive(Debug, Clone, Args, Serialize)]
pub struct RunArgs {
    /// Oscillator rate.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Time horizon.
    #[arg(long = "T", default_value_t = 1.0)]
    #[serde(rename = "T")]
    pub horizon: f64,
    /// Spatial dimension.
    #[arg(long = "N", default_value_t = 1)]
    #[serde(rename = "N")]
    pub dim: usize,
    /// Mixing parameter of the periodic family.
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    /// Bridge endpoint, comma separated (default all ones).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub endpoint: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = ProcessArg::Stationary)]
    pub process: ProcessArg,
    /// Explicit time grid, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["grid_count", "grid_range"])]
    pub grid: Option<Vec<f64>>,
    /// Number of equally spaced grid times.
    #[arg(long, default_value_t = 5)]
    pub grid_count: usize,
    /// Grid range `start,end` (default `0,T`).
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub grid_range: Option<[f64; 2]>,
    /// Kernel time.
    #[arg(long, default_value_t = 0.5)]
    pub time: f64,
    /// Points per axis of the kernel grid.
    #[arg(long, default_value_t = 9)]
    pub points: usize,
    /// Kernel point range `start,end`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "-3,3")]
    pub point_range: [f64; 2],
    /// Number of sampled paths.
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = SamplerArg::Exact)]
    pub sampler: SamplerArg,
    /// Mesh refinement per interval for the periodic sampler.
    #[arg(long, default_value_t = bernstein_core::samplers::DEFAULT_SUBSTEPS)]
    pub substeps: usize,
    /// Series truncation per axis.
    #[arg(long, default_value_t = bernstein_core::mehler_kernel::DEFAULT_TRUNCATION)]
    pub truncation: usize,
    /// Gauss-Hermite order per axis.
    #[arg(long, default_value_t = bernstein_core::quadrature::DEFAULT_ORDER)]
    pub quad_order: usize,
    /// Output file (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Omit the timestamp so identical runs give identical bytes.
    #[arg(long)]
    pub deterministic: bool,
    /// Relative error injected into verification references (testing only).
    #[arg(long, default_value_t = 0.0, hide = true)]
    pub perturb: f64,
}

/// `start,end` as two reals.
fn parse_range(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [a, b] => {
            let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
            Ok([parse(a)?, parse(b)?])
        }
        _ => Err(format!("expected `start,end`, got {s:?}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command.name(), cli.command.args()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
