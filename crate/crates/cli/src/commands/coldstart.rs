//! `reco coldstart` — replay rating accuracy over growing user samples.

use std::path::PathBuf;

use clap::Args;
use reco_core::eval::cold_start_experiment;
use reco_core::ratings::load_logs;
use reco_core::{load_catalog, Result};

use crate::artifacts::{resolve_out, write_meta};
use crate::config::Config;

#[derive(Debug, Args)]
pub struct ColdstartArgs {
    /// Rating log file (the experiment splits it internally).
    #[arg(long)]
    ratings: PathBuf,
    /// Item description file (`item<TAB>attribute<TAB>value[<TAB>weight]`).
    #[arg(long)]
    catalog: PathBuf,
    /// Input format override: tsv or movielens.
    #[arg(long)]
    format: Option<String>,
    /// Comma-separated user-community sizes, strictly increasing.
    #[arg(long)]
    counts: Option<String>,
    /// Profile regime: long (10% held out) or short (90% held out).
    #[arg(long)]
    regime: Option<String>,
    /// Comma-separated modes: collaborative, thematic, hybrid-light.
    #[arg(long)]
    modes: Option<String>,
    /// Neighbors per item for the per-point matrices.
    #[arg(long)]
    k: Option<usize>,
    /// Results table destination (default: <output root>/coldstart.tsv).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(base: &Config, args: &ColdstartArgs) -> Result<()> {
    let config = super::finish_config(
        base,
        &[
            ("format", args.format.clone()),
            ("coldstart_counts", args.counts.clone()),
            ("coldstart_regime", args.regime.clone()),
            ("coldstart_modes", args.modes.clone()),
            ("coldstart_k", args.k.map(|v| v.to_string())),
        ],
    )?;
    let logs = load_logs(&args.ratings, config.scale()?, config.format)?;
    let catalog = load_catalog(&args.catalog)?;
    let points = cold_start_experiment(
        &logs,
        &catalog,
        &config.coldstart_counts,
        config.coldstart_regime,
        &config.coldstart_modes,
        config.coldstart_k,
        config.seed,
    )?;

    let mut table = String::new();
    table.push_str("# schema: reco-coldstart-v1\n");
    table.push_str(&format!("# config_hash: {}\n", config.hash()));
    table.push_str(&format!("# ratings_fingerprint: {}\n", logs.fingerprint()));
    table.push_str("users\tmode\tregime\trmse_out\tmae_out\tcoverage\tn_test\n");
    println!("users  mode           regime  rmse_out  coverage  n_test");
    for p in &points {
        table.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            p.users,
            p.mode.token(),
            p.regime.token(),
            p.accuracy.rmse_out,
            p.accuracy.mae_out,
            p.accuracy.coverage,
            p.n_test
        ));
        println!(
            "{:>5}  {:<13}  {:<6}  {:>8.4}  {:>8.4}  {:>6}",
            p.users,
            p.mode.token(),
            p.regime.token(),
            p.accuracy.rmse_out,
            p.accuracy.coverage,
            p.n_test
        );
    }
    let out = resolve_out(args.out.as_deref(), "coldstart.tsv")?;
    std::fs::write(&out, table).map_err(|e| reco_core::Error::io(&out, e))?;
    write_meta(&out, &config.hash(), &[("ratings", &logs.fingerprint())])?;
    println!("wrote: {}", out.display());
    Ok(())
}
