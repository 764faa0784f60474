//! Command line for the reco engine: ingest and split rating logs, train
//! neighborhood and factor models, evaluate them on held-out data, produce
//! recommendations, and summarize runs.
//!
//! Every command resolves a configuration (file + flag overrides), stamps
//! its hash and the input fingerprints into whatever it writes, and is
//! byte-deterministic given the same inputs, config, and seed — including
//! across `--workers` settings.

mod artifacts;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use reco_core::Error;

use crate::config::Config;

#[derive(Debug, Parser)]
#[command(
    name = "reco",
    version,
    about = "Hybrid recommender engine and offline evaluation harness"
)]
struct Cli {
    /// Key-value configuration file; flags override individual keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: all available cores; never changes results).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Random seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a rating log and rewrite it in canonical form.
    Ingest(commands::ingest::IngestArgs),
    /// Partition a rating log into train/test files or k folds.
    Split(commands::split::SplitArgs),
    /// Build and save an item-item similarity matrix.
    TrainKnn(commands::train::TrainKnnArgs),
    /// Fit and save a matrix-factorization model.
    TrainGravity(commands::train::TrainGravityArgs),
    /// Score a model on held-out data and write an evaluation report.
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Produce a top-N list for one user.
    Recommend(commands::recommend::RecommendArgs),
    /// List the nearest neighbors of one item in a saved matrix.
    Similar(commands::similar::SimilarArgs),
    /// Run the growing-community accuracy experiment.
    Coldstart(commands::coldstart::ColdstartArgs),
    /// Summarize evaluation reports into a comparison table.
    Report(commands::report::ReportArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: &Cli) -> reco_core::Result<()> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(Error::InvalidParam("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidParam(format!("worker pool: {e}")))?;
    }
    let mut base = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        base.set("seed", &seed.to_string())?;
    }
    match &cli.command {
        Command::Ingest(args) => commands::ingest::run(&base, args),
        Command::Split(args) => commands::split::run(&base, args),
        Command::TrainKnn(args) => commands::train::run_knn(&base, args),
        Command::TrainGravity(args) => commands::train::run_gravity(&base, args),
        Command::Evaluate(args) => commands::evaluate::run(&base, args),
        Command::Recommend(args) => commands::recommend::run(&base, args),
        Command::Similar(args) => commands::similar::run(&base, args),
        Command::Coldstart(args) => commands::coldstart::run(&base, args),
        Command::Report(args) => commands::report::run(&base, args),
    }
}

/// 3 = artifact/data fingerprint mismatch, 2 = malformed input or invalid
/// parameters, 1 = any other failure (clap reports usage errors as 2 itself).
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::FingerprintMismatch { .. } => 3,
        Error::Parse { .. } | Error::InvalidParam(_) => 2,
        _ => 1,
    }
}
