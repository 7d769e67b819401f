//! `localdepth` command-line tool.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Local depth, PILD matrices, depth-based classification and outlier detection.
#[derive(Debug, Parser)]
#[command(name = "localdepth", version, about)]
struct Cli {
    /// Worker threads (default: available parallelism). LOCALDEPTH_THREADS overrides.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-point local depth profile and integrated local depth.
    Depth(DepthArgs),
    /// PILD contribution matrix.
    Pild(PildArgs),
    /// Symmetric depth-based similarity matrix.
    Similarity(SimilarityArgs),
    /// Classify test points from labeled training data.
    Classify(ClassifyArgs),
    /// Score points and flag the most outlying ones.
    Outliers(OutliersArgs),
    /// Generate a simulation scenario.
    Simulate(SimulateArgs),
    /// Repeat a scenario experiment and summarize the metric.
    Replicate(ReplicateArgs),
    /// Run randomized structural checks and report pass/fail.
    CheckInvariants(CheckArgs),
}

#[derive(Debug, Args)]
struct DepthArgs {
    #[arg(long)]
    data: PathBuf,
    /// `uniform:B0,B1` (B0 may be `auto`), `point:B`, or `file:<path>`.
    #[arg(long, default_value = "uniform:auto,1")]
    weights: String,
    /// Smallest neighborhood size.
    #[arg(long, default_value_t = 3)]
    min_points: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PildArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "uniform:auto,1")]
    weights: String,
    #[arg(long, default_value_t = 3)]
    min_points: usize,
    #[arg(long)]
    out: PathBuf,
    /// Also write column sums (`id,centrality`).
    #[arg(long)]
    centrality_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimilarityArgs {
    #[arg(long)]
    data: PathBuf,
    /// `pild` (row-normalized PILD) or `sd` (reflected spatial depth).
    #[arg(long, default_value = "pild")]
    kind: String,
    /// Weights for `--kind pild`.
    #[arg(long, default_value = "uniform:auto,1")]
    weights: String,
    #[arg(long, default_value_t = 3)]
    min_points: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    /// md, ld, ild, dknn or pild.
    #[arg(long)]
    method: String,
    /// Locality for ld/ild/pild (ild and pild default to 1), k for dknn, or
    /// `cv` for cross-validated selection.
    #[arg(long)]
    param: Option<String>,
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long, default_value = "label")]
    label_col: String,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Seed for fold assignment.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct OutliersArgs {
    /// gd, ld, ild, pildsum or lof.
    #[arg(long)]
    method: String,
    /// Dissimilarity for lof: euclid, sd or pild.
    #[arg(long, default_value = "euclid")]
    dissim: String,
    /// LOF neighbors: an integer or `sweep:lo..hi`.
    #[arg(long)]
    k: Option<String>,
    /// Locality level, or a comma-separated list to sweep.
    #[arg(long, default_value = "1")]
    locality: String,
    /// Known contamination fraction; defaults to the truth column's rate.
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    truth_col: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// setup1..setup4, toyA or toyB.
    #[arg(long)]
    scenario: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Replicate stream (0 is the plain seed).
    #[arg(long, default_value_t = 0)]
    rep: u64,
    /// Training set for setups, the full sample for toy scenarios.
    #[arg(long)]
    out: PathBuf,
    /// Test set for setups (default `<out stem>_test.csv`).
    #[arg(long)]
    test_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReplicateArgs {
    #[arg(long)]
    scenario: String,
    #[arg(long, default_value_t = 20)]
    reps: usize,
    /// Classifier (md, ld, ild, dknn, pild) for setups; gd, ld, ild, pildsum or
    /// lof for toy scenarios.
    #[arg(long)]
    method: String,
    /// Classifier parameter or `cv` (setups only); ild and pild default to 1.
    #[arg(long)]
    param: Option<String>,
    /// Locality for outlier methods.
    #[arg(long, default_value = "0.25")]
    locality: f64,
    /// LOF neighbors for toy scenarios.
    #[arg(long, default_value_t = 20)]
    k: usize,
    #[arg(long, default_value = "euclid")]
    dissim: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 60)]
    n: usize,
    /// Optional CSV report (`check,passed,detail`); stdout always gets a summary.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn configure_threads(flag: Option<usize>) -> Result<usize, String> {
    let from_env = match std::env::var("LOCALDEPTH_THREADS") {
        Ok(v) => Some(
            v.parse::<usize>()
                .map_err(|_| format!("LOCALDEPTH_THREADS must be a positive integer, got '{v}'"))?,
        ),
        Err(_) => None,
    };
    let threads = from_env.or(flag).unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())?;
    Ok(rayon::current_num_threads())
}

fn main() -> ExitCode {
    manifest::start_clock();
    let cli = Cli::parse();
    let threads = match configure_threads(cli.threads) {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match commands::run(cli.command, threads) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}
