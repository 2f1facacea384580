//! `coregrowth`: ingest citation data, measure attachment rates per window,
//! fit exponents and run growth simulations.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 not enough data for a result.

mod bundle;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] coregrowth::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Insufficient(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Data(coregrowth::Error::Config(_)) => 1,
            CliError::Data(_) | CliError::Io { .. } => 2,
            CliError::Insufficient(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "coregrowth", version, about = "Degree and coreness preferential-attachment measurement")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize a dataset into the timestamped edge-list format.
    Ingest(IngestArgs),
    /// Per-window attachment tables.
    Measure(MeasureArgs),
    /// Exponent series and summaries from measured tables.
    Fit(FitArgs),
    /// Grow a synthetic network with a planted attachment kernel.
    Simulate(SimulateArgs),
    /// `measure` followed by `fit` into one output directory.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// `key = value` file supplying any option below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Leave the generation time out of output headers.
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub common: Common,
    /// generic_tsv or snap_citation
    #[arg(long)]
    pub format: Option<String>,
    /// Edge list in the generic format.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// SNAP citation edge file.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// SNAP node dates file.
    #[arg(long)]
    pub dates: Option<PathBuf>,
    /// Prefix marking cross-listed ids in the dates file.
    #[arg(long)]
    pub strip_prefix: Option<String>,
    /// Normalized edge list to write.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    /// undirected, in or out
    #[arg(long)]
    pub degree_mode: Option<String>,
    /// Window length (days for dated data).
    #[arg(long)]
    pub dt: Option<i64>,
    /// First cutoff, an integer or YYYY-MM-DD.
    #[arg(long)]
    pub start: Option<String>,
    /// Distance between cutoffs; defaults to the window length.
    #[arg(long)]
    pub stride: Option<i64>,
    /// Last allowed cutoff, an integer or YYYY-MM-DD.
    #[arg(long)]
    pub end: Option<String>,
    /// Shells for the within-shell curves.
    #[arg(long, value_delimiter = ',')]
    pub c0: Vec<u32>,
    /// Degree classes for the among-shell curves.
    #[arg(long, value_delimiter = ',')]
    pub k0: Vec<u32>,
}

#[derive(Debug, Args)]
pub struct FitOptionArgs {
    /// Classes with fewer member nodes are left out of fits.
    #[arg(long)]
    pub min_class_size: Option<u64>,
    /// Fraction of the largest-abscissa points dropped before fitting.
    #[arg(long)]
    pub tail_trim: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub common: Common,
    /// Normalized edge list.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub window: WindowArgs,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: Common,
    /// Directory written by `measure`.
    #[arg(long)]
    pub bundles: Option<PathBuf>,
    /// Defaults to the bundle directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub fit: FitOptionArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Final node count.
    #[arg(long)]
    pub n: Option<usize>,
    /// Minimum links per newcomer.
    #[arg(long)]
    pub m: Option<usize>,
    /// Mean number of extra links on top of `m` (geometric); 0 means exactly `m`.
    #[arg(long)]
    pub extra_mean: Option<f64>,
    /// degree_only, coreness_only or hybrid
    #[arg(long)]
    pub kernel: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Added to the degree before exponentiation.
    #[arg(long)]
    pub offset: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Recompute coreness every this many ticks; 1 keeps it exact.
    #[arg(long)]
    pub refresh_every: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    pub fit: FitOptionArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
