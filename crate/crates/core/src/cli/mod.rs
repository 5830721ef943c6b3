//! `multig-rank` command line: `gen`, `pool`, `train`, `rank`, `eval`.
//!
//! Exit codes: 0 success, 1 validation error, 2 numerical failure, 3 I/O
//! error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::RunConfig;

use crate::dataset::QueryMode;
use crate::error::{Error, ErrorKind};

#[derive(Debug, Parser)]
#[command(name = "multig-rank", version, about = "Multiple-graph regularized ranking")]
pub struct Cli {
    /// TOML file with default values for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Random seed (data generation).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic database and query set.
    Gen(GenArgs),
    /// Build the candidate graph pool over a database.
    Pool(PoolArgs),
    /// Learn graph weights offline.
    Train(TrainArgs),
    /// Rank the database for every query.
    Rank(RankArgs),
    /// Evaluate all ranking arms over a query set.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub classes: Option<usize>,
    #[arg(long)]
    pub per_class: Option<usize>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub spread: Option<f64>,
    #[arg(long)]
    pub separation: Option<f64>,
    /// Queries drawn per class.
    #[arg(long)]
    pub queries_per_class: Option<usize>,
    #[arg(long, value_enum)]
    pub query_mode: Option<QueryMode>,
    /// Write JSON instead of CSV.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct PoolArgs {
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Weighting schemes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub schemes: Option<Vec<String>>,
    /// Neighbor counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    /// Gaussian bandwidths as multiples of the median pairwise distance.
    #[arg(long, value_delimiter = ',')]
    pub sigma_mult: Option<Vec<f64>>,
}

#[derive(Debug, Args, Clone)]
pub struct ParamArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Number of alternating iterations.
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub ridge: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub pool: Option<PathBuf>,
    /// Label depth used for relevance.
    #[arg(long)]
    pub level: Option<usize>,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Arm {
    Multig,
    Grank,
    Pairwise,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub pool: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub queries: Option<PathBuf>,
    /// Ranking arm; defaults to the learned multi-graph ranker.
    #[arg(long, value_enum)]
    pub baseline: Option<Arm>,
    /// Pool graph used by `--baseline grank`.
    #[arg(long)]
    pub graph: Option<usize>,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub pool: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub queries: Option<PathBuf>,
    #[arg(long)]
    pub level: Option<usize>,
    #[command(flatten)]
    pub params: ParamArgs,
}

pub fn exit_code(err: &Error) -> u8 {
    match err.kind() {
        ErrorKind::Validation => 1,
        ErrorKind::Numerical => 2,
        ErrorKind::Io => 3,
    }
}

/// Parses `args` and runs the selected command.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
