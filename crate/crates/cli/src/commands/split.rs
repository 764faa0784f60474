//! `reco split` — deterministic train/test splits and k-fold partitions.

use std::path::PathBuf;

use clap::Args;
use reco_core::ratings::{kfold, load_logs, split_train_test_with};
use reco_core::{RatingsMatrix, Result};

use crate::artifacts::{output_root, write_logs, write_meta};
use crate::config::Config;

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Rating log file to split.
    #[arg(long)]
    ratings: PathBuf,
    /// Input format override: tsv or movielens.
    #[arg(long)]
    format: Option<String>,
    /// Fraction of each user's logs held out for testing.
    #[arg(long)]
    test_fraction: Option<f64>,
    /// Split strategy: per-user or global.
    #[arg(long)]
    strategy: Option<String>,
    /// Produce a k-fold partition instead of one split.
    #[arg(long)]
    folds: Option<usize>,
    /// Directory for the split files (default: the output root).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

pub fn run(base: &Config, args: &SplitArgs) -> Result<()> {
    let config = super::finish_config(
        base,
        &[
            ("format", args.format.clone()),
            ("test_fraction", args.test_fraction.map(|v| v.to_string())),
            ("split_strategy", args.strategy.clone()),
        ],
    )?;
    let m = load_logs(&args.ratings, config.scale()?, config.format)?;
    let dir = args.out_dir.clone().unwrap_or_else(output_root);
    std::fs::create_dir_all(&dir).map_err(|e| reco_core::Error::io(&dir, e))?;
    let source = m.fingerprint();

    let write_side = |name: &str, side: &RatingsMatrix| -> Result<()> {
        let path = dir.join(name);
        write_logs(side, &path)?;
        write_meta(&path, &config.hash(), &[("ratings", &source)])?;
        println!("{}: {} logs -> {}", name.trim_end_matches(".tsv"), side.len(), path.display());
        Ok(())
    };

    match args.folds {
        None => {
            let (train, test) = split_train_test_with(
                &m,
                config.test_fraction,
                config.seed,
                config.split_strategy,
            )?;
            write_side("train.tsv", &train)?;
            write_side("test.tsv", &test)?;
        }
        Some(k) => {
            for (fold, (train, test)) in kfold(&m, k, config.seed)?.iter().enumerate() {
                write_side(&format!("fold{fold}-train.tsv"), train)?;
                write_side(&format!("fold{fold}-test.tsv"), test)?;
            }
        }
    }
    Ok(())
}
