//! `ecfit`: fitness and complexity of export networks from the command line.

mod commands;
mod formats;
mod output;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "ecfit",
    version,
    about = "Economic fitness and complexity via the non-homogeneous map"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Suppress progress messages.
    #[arg(long, global = true)]
    pub quiet: bool,

    /// Seed for every random component (required by `noise`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Directory that relative output paths are resolved against.
    #[arg(long, global = true, env = "ECFIT_WORKSPACE")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Revealed comparative advantage from a `country,product,value` table.
    Rca(commands::RcaArgs),
    /// Threshold an RCA table into a binary matrix.
    Binarize(commands::BinarizeArgs),
    /// Iterate a map to its fixed point.
    Fit(commands::FitArgs),
    /// Analytic approximations of the rescaled fixed point.
    Approx(commands::ApproxArgs),
    /// Jacobian spectrum at a fixed point.
    Stability(commands::StabilityArgs),
    /// Ranking robustness under random bit flips.
    Noise(commands::NoiseArgs),
    /// Inefficiency detrended by diversification.
    Netefficiency(commands::NetEfficiencyArgs),
    /// Original against rescaled metrics.
    Compare(commands::CompareArgs),
    /// Multi-year run: RCA, binarize, solve, efficiency, time series.
    Pipeline(pipeline::PipelineArgs),
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ecfit_core::Error),

    #[error("{failed} of {total} years failed")]
    YearsFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.category(),
            CliError::YearsFailed { .. } => "pipeline",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.category() {
            "usage" => 2,
            "parse" => 3,
            "validation" => 4,
            "domain" => 5,
            "config" => 6,
            "numerical" => 7,
            "io" => 8,
            _ => 9,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Rca(a) => commands::rca(&cli.global, a),
        Command::Binarize(a) => commands::binarize(&cli.global, a),
        Command::Fit(a) => commands::fit(&cli.global, a),
        Command::Approx(a) => commands::approx(&cli.global, a),
        Command::Stability(a) => commands::stability(&cli.global, a),
        Command::Noise(a) => commands::noise(&cli.global, a),
        Command::Netefficiency(a) => commands::net_efficiency(&cli.global, a),
        Command::Compare(a) => commands::compare(&cli.global, a),
        Command::Pipeline(a) => pipeline::run(&cli.global, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code())
        }
    }
}
