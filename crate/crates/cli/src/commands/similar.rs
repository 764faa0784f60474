//! `reco similar` — nearest neighbors of one item from a stored matrix.

use std::path::PathBuf;

use clap::Args;
use reco_core::{similar_items, Error, Result, SimilarityMatrix};

use crate::config::Config;

#[derive(Debug, Args)]
pub struct SimilarArgs {
    /// Similarity matrix artifact.
    #[arg(long)]
    matrix: PathBuf,
    /// Item to look up, by name.
    #[arg(long)]
    item: String,
    /// Neighbors to list.
    #[arg(long, default_value_t = 10)]
    n: usize,
}

pub fn run(base: &Config, args: &SimilarArgs) -> Result<()> {
    let config = super::finish_config(base, &[])?;
    let _ = config;
    let sm = SimilarityMatrix::import(&args.matrix)?;
    let item = sm
        .items()
        .get(&args.item)
        .ok_or_else(|| Error::UnknownItem(args.item.clone()))?;
    let neighbors = similar_items(&sm, item, args.n);
    println!(
        "{} neighbors of {} ({} over {} items)",
        neighbors.len(),
        args.item,
        sm.measure(),
        sm.n_items()
    );
    for (rank, (other, weight)) in neighbors.iter().enumerate() {
        println!("{:>3}. {}\t{:.4}", rank + 1, sm.items().name(*other), weight);
    }
    Ok(())
}
