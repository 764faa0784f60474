//! `reco ingest` — parse, validate, deduplicate, and canonicalize logs.

use std::path::PathBuf;

use clap::Args;
use reco_core::ratings::load_logs;
use reco_core::Result;

use crate::artifacts::{resolve_out, write_logs, write_meta};
use crate::config::Config;

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Rating log file (`user<TAB>item<TAB>rating[<TAB>date]`, or the
    /// `::`-separated layout with --format movielens).
    #[arg(long)]
    ratings: PathBuf,
    /// Input format override: tsv or movielens.
    #[arg(long)]
    format: Option<String>,
    /// Destination for the canonical copy (default: <output root>/logs.tsv).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(base: &Config, args: &IngestArgs) -> Result<()> {
    let config = super::finish_config(base, &[("format", args.format.clone())])?;
    let m = load_logs(&args.ratings, config.scale()?, config.format)?;
    let out = resolve_out(args.out.as_deref(), "logs.tsv")?;
    write_logs(&m, &out)?;
    write_meta(&out, &config.hash(), &[("ratings", &m.fingerprint())])?;

    println!("logs: {}", m.len());
    println!("users: {}", m.n_users());
    println!("items: {}", m.n_items());
    println!("scale: {}", m.scale());
    if let Some(mean) = m.global_mean() {
        println!("global mean: {mean:.4}");
    }
    println!("fingerprint: {}", m.fingerprint());
    println!("wrote: {}", out.display());
    Ok(())
}
