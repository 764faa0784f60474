//! `reco train-knn` and `reco train-gravity` — similarity matrices and
//! factor models, persisted with the fingerprint of what trained them.

use std::path::PathBuf;

use clap::Args;
use reco_core::ratings::load_logs;
use reco_core::{gravity, knn_search, Result};

use crate::artifacts::{resolve_out, write_meta};
use crate::config::Config;

#[derive(Debug, Args)]
pub struct TrainKnnArgs {
    /// Training log file.
    #[arg(long)]
    train: PathBuf,
    /// Input format override: tsv or movielens.
    #[arg(long)]
    format: Option<String>,
    /// Neighbors kept per item.
    #[arg(long)]
    k: Option<usize>,
    /// Similarity measure: pearson, extended-pearson, cosine,
    /// extended-cosine, jaccard, mix, extended-mix, wpearson.
    #[arg(long)]
    measure: Option<String>,
    /// Matrix destination (default: <output root>/knn-<measure>-k<k>.tsv).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run_knn(base: &Config, args: &TrainKnnArgs) -> Result<()> {
    let config = super::finish_config(
        base,
        &[
            ("format", args.format.clone()),
            ("knn_k", args.k.map(|v| v.to_string())),
            ("knn_measure", args.measure.clone()),
        ],
    )?;
    let m = load_logs(&args.train, config.scale()?, config.format)?;
    let started = std::time::Instant::now();
    let sm = knn_search(&m, config.knn_k, config.knn_measure)?;
    let default_name = format!("knn-{}-k{}.tsv", config.knn_measure.token(), config.knn_k);
    let out = resolve_out(args.out.as_deref(), &default_name)?;
    sm.export(&out)?;
    write_meta(&out, &config.hash(), &[("train", &m.fingerprint())])?;

    println!("measure: {}", sm.measure());
    println!("k: {}", sm.k());
    println!("items: {}", sm.n_items());
    println!("edges: {}", sm.len());
    println!("built in: {:.2}s", started.elapsed().as_secs_f64());
    println!("wrote: {}", out.display());
    Ok(())
}

#[derive(Debug, Args)]
pub struct TrainGravityArgs {
    /// Training log file.
    #[arg(long)]
    train: PathBuf,
    /// Input format override: tsv or movielens.
    #[arg(long)]
    format: Option<String>,
    /// Factor slots per vector, bias slots included.
    #[arg(long)]
    factors: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    regularization: Option<f64>,
    #[arg(long)]
    max_epochs: Option<usize>,
    /// Successive validation-RMSE increases tolerated before stopping.
    #[arg(long)]
    patience: Option<usize>,
    /// Fraction of train logs held out to steer early stopping.
    #[arg(long)]
    validation_fraction: Option<f64>,
    /// Disable the fixed bias slots.
    #[arg(long)]
    no_bias: bool,
    /// Model destination (default: <output root>/gravity-f<factors>.bin).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a human-readable factor table here.
    #[arg(long)]
    export_text: Option<PathBuf>,
}

pub fn run_gravity(base: &Config, args: &TrainGravityArgs) -> Result<()> {
    let config = super::finish_config(
        base,
        &[
            ("format", args.format.clone()),
            ("factors", args.factors.map(|v| v.to_string())),
            ("learning_rate", args.learning_rate.map(|v| v.to_string())),
            ("regularization", args.regularization.map(|v| v.to_string())),
            ("max_epochs", args.max_epochs.map(|v| v.to_string())),
            ("patience", args.patience.map(|v| v.to_string())),
            (
                "validation_fraction",
                args.validation_fraction.map(|v| v.to_string()),
            ),
            ("use_bias", args.no_bias.then(|| "false".to_string())),
        ],
    )?;
    let m = load_logs(&args.train, config.scale()?, config.format)?;
    let started = std::time::Instant::now();
    let model = gravity::train(&m, &config.gravity_params())?;
    let default_name = format!("gravity-f{}.bin", config.factors);
    let out = resolve_out(args.out.as_deref(), &default_name)?;
    model.save(&out)?;
    write_meta(&out, &config.hash(), &[("train", &m.fingerprint())])?;

    let curve = model.curve();
    println!("factors: {} (bias: {})", model.k(), model.use_bias());
    println!("epochs trained: {}", curve.len());
    if let Some(last) = curve.last() {
        match last.val_rmse {
            Some(v) => println!("final rmse: train {:.4}, validation {v:.4}", last.train_rmse),
            None => println!("final rmse: train {:.4}", last.train_rmse),
        }
    }
    println!("trained in: {:.2}s", started.elapsed().as_secs_f64());
    println!("wrote: {}", out.display());
    if let Some(text_path) = &args.export_text {
        let text_path = resolve_out(Some(text_path), "unused")?;
        model.export_text(&text_path)?;
        println!("wrote: {}", text_path.display());
    }
    Ok(())
}
