//! `bundlefair`: audit bundle recommendation runs for exposure fairness.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{CliError, Code};

#[derive(Parser, Debug)]
#[command(name = "bundlefair", version, about = "Exposure-fairness audits for bundle recommendation")]
struct Cli {
    /// Worker threads for per-user computations (default: all cores).
    #[arg(long, global = true, env = "BUNDLEFAIR_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Utility and fairness report (report.json, report.csv, group and exposure CSVs).
    Audit(AuditArgs),
    /// Frequency histograms and the bundle vs. item popularity scatter.
    Distributions(AuditArgs),
    /// Gini index of interactions and of the run, at bundle and item level.
    Gini(AuditArgs),
    /// Write a synthetic dataset in the on-disk layout.
    Generate(GenerateArgs),
    /// Print dataset statistics as JSON.
    Stats(StatsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Bundle,
    Item,
}

#[derive(Args, Debug, Clone)]
pub struct AuditArgs {
    /// Dataset directory (data_size.txt, user_bundle*.txt, user_item.txt, bundle_item.txt).
    #[arg(long)]
    pub dataset_dir: PathBuf,
    /// Prediction file ("user<TAB>b1,b2,..." per line) or a baseline:
    /// most_popular, random, item_affinity.
    #[arg(long)]
    pub predictions: String,
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    /// Patience of the geometric browsing model.
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    /// Interaction share defining the popular group.
    #[arg(long, default_value_t = 0.2)]
    pub pop_share: f64,
    #[arg(long, default_value_t = 0.9)]
    pub tendency_lo: f64,
    #[arg(long, default_value_t = 1.1)]
    pub tendency_hi: f64,
    /// Seed for the 7:1:2 split (when the dataset is not pre-split) and the random baseline.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "BUNDLEFAIR_OUTPUT_DIR", default_value = "bundlefair-out")]
    pub output_dir: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Level::Bundle, Level::Item])]
    pub levels: Vec<Level>,
    /// Report infinite logs for empty groups instead of flooring operands at 1e-10.
    #[arg(long)]
    pub no_smoothing: bool,
}

#[derive(Args, Debug, Clone)]
pub struct GenerateArgs {
    #[arg(long, env = "BUNDLEFAIR_OUTPUT_DIR")]
    pub output_dir: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub n_users: usize,
    #[arg(long, default_value_t = 100)]
    pub n_bundles: usize,
    #[arg(long, default_value_t = 400)]
    pub n_items: usize,
    #[arg(long, default_value_t = 8.0)]
    pub bundle_size_mean: f64,
    #[arg(long, default_value_t = 1.0)]
    pub bundle_skew: f64,
    #[arg(long, default_value_t = 1.0)]
    pub item_skew: f64,
    #[arg(long, default_value_t = 6)]
    pub ub_per_user: usize,
    #[arg(long, default_value_t = 10)]
    pub ui_per_user: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write a single user_bundle.txt instead of train/valid/test files.
    #[arg(long)]
    pub no_split: bool,
}

#[derive(Args, Debug, Clone)]
pub struct StatsArgs {
    #[arg(long)]
    pub dataset_dir: PathBuf,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::new(Code::Config, "--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::new(Code::Config, e.to_string()))?;
    }
    match cli.command {
        Command::Audit(args) => commands::audit(&args),
        Command::Distributions(args) => commands::distributions(&args),
        Command::Gini(args) => commands::gini(&args),
        Command::Generate(args) => commands::generate(&args),
        Command::Stats(args) => commands::stats(&args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string();
            let first = first.lines().next().unwrap_or("invalid arguments");
            let first = first.trim_start_matches("error: ");
            eprintln!("{}", CliError::new(Code::Config, first));
            return ExitCode::FAILURE;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::FAILURE
        }
    }
}
