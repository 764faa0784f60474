//! `reco evaluate` — run a scorer against held-out logs across the four
//! tasks and write the text + TSV report pair.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use reco_core::eval::{
    evaluate_discovery, evaluate_scoring, DiscoveryStrategy, EvaluationReport, RunMeta,
};
use reco_core::ratings::read_logs;
use reco_core::{compute_segments, Error, RatingsMatrix, Result, TopNRequest};

use crate::artifacts::{resolve_out, write_meta};
use crate::config::Config;

use super::scorers::{load_artifacts, make_scorer, ScorerKind};

/// Attribution convention stamped into every report this command writes.
pub const RANKING_NOTE: &str = "ranking pairs that straddle the item popularity split count \
toward the user-side marginals only; the four segment cells rank same-class pairs";

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Training log file.
    #[arg(long)]
    train: PathBuf,
    /// Held-out log file.
    #[arg(long)]
    test: PathBuf,
    /// Input format override: tsv or movielens.
    #[arg(long)]
    format: Option<String>,
    /// Scorer under test: default, random, knn, gravity, or emulated.
    #[arg(long, default_value = "knn")]
    scorer: String,
    /// Similarity matrix artifact (scorer: knn).
    #[arg(long)]
    knn: Option<PathBuf>,
    /// Factor model artifact (scorer: gravity or emulated).
    #[arg(long)]
    gravity: Option<PathBuf>,
    /// Comma-separated tasks: decide, compare, discover, explore.
    #[arg(long, default_value = "decide,compare")]
    tasks: String,
    /// Scoring mode override: mean-based or mono-user.
    #[arg(long)]
    scoring: Option<String>,
    /// Factor-space measure for the emulated scorer:
    /// factor-pearson, factor-cosine, factor-neg-euclidean.
    #[arg(long)]
    factor_measure: Option<String>,
    /// Neighborhood size override (emulated similarities, explore walk).
    #[arg(long)]
    k: Option<usize>,
    /// List length override for discover/explore.
    #[arg(long)]
    n: Option<usize>,
    /// Report model label (default: the scorer's own label).
    #[arg(long)]
    label: Option<String>,
    /// Fold tag recorded in the report.
    #[arg(long, default_value = "split")]
    fold: String,
    /// Downgrade artifact fingerprint mismatches to warnings.
    #[arg(long)]
    force: bool,
    /// Report path prefix (default: <output root>/<label>-<fold>).
    #[arg(long)]
    out_prefix: Option<PathBuf>,
}

pub fn run(base: &Config, args: &EvaluateArgs) -> Result<()> {
    let config = super::finish_config(
        base,
        &[
            ("format", args.format.clone()),
            ("scoring", args.scoring.clone()),
            ("factor_measure", args.factor_measure.clone()),
            ("knn_k", args.k.map(|v| v.to_string())),
            ("top_n", args.n.map(|v| v.to_string())),
        ],
    )?;
    let tasks: BTreeSet<&str> = args.tasks.split(',').map(str::trim).collect();
    for task in &tasks {
        if !matches!(*task, "decide" | "compare" | "discover" | "explore") {
            return Err(Error::InvalidParam(format!("unknown task '{task}'")));
        }
    }
    let kind: ScorerKind = args.scorer.parse()?;

    let scale = config.scale()?;
    let train_raw = read_logs(&args.train, scale, config.format)?;
    let test_raw = read_logs(&args.test, scale, config.format)?;
    let mut built = RatingsMatrix::from_log_sets(vec![train_raw, test_raw], scale)?;
    let test = built.pop().expect("two sets in");
    let train = built.pop().expect("two sets in");
    let grid = compute_segments(&train)?;

    let artifacts = load_artifacts(
        kind,
        args.knn.as_deref(),
        args.gravity.as_deref(),
        &train,
        &config,
        args.force,
        tasks.contains("explore"),
    )?;
    let scorer = make_scorer(kind, &artifacts, &train, &config)?;
    let label = args.label.clone().unwrap_or_else(|| scorer.label());

    let mut report = EvaluationReport::new(RunMeta {
        model: label.clone(),
        fold: args.fold.clone(),
        seed: config.seed,
        wall_clock_s: 0.0,
        config_hash: config.hash(),
        train_fingerprint: train.fingerprint(),
        test_fingerprint: test.fingerprint(),
    });
    report.note(RANKING_NOTE);

    let started = Instant::now();
    if tasks.contains("decide") || tasks.contains("compare") {
        let scoring = evaluate_scoring(scorer.as_ref(), &train, &test, &grid)?;
        println!(
            "decide: rmse_out={:.4} mae_out={:.4} coverage={:.4} ({} predictions, {:.0}/s)",
            scoring.accuracy.rmse_out,
            scoring.accuracy.mae_out,
            scoring.accuracy.coverage,
            scoring.n_test,
            scoring.predictions_per_s,
        );
        if let Some(global) = &scoring.ranking.global {
            println!(
                "compare: ndpm={:.4} percent_compatible={:.4} ({} pairs)",
                global.ndpm, global.percent_compatible, global.pairs.total
            );
        }
        report.push_scoring(&scoring);
    }
    if tasks.contains("discover") {
        let strategy = DiscoveryStrategy::FullCatalog { n: config.top_n };
        let discovery = evaluate_discovery(scorer.as_ref(), &train, &test, &grid, &strategy)?;
        print_discovery("discover", &discovery);
        report.push_discovery("discover", &discovery);
    }
    if tasks.contains("explore") {
        let sm = artifacts.matrix.as_ref().ok_or_else(|| {
            Error::InvalidParam(
                "the explore task walks a similarity matrix; use scorer knn, gravity, or emulated"
                    .into(),
            )
        })?;
        let mut request = TopNRequest::new(config.top_n);
        request.g = config.top_g;
        request.c = config.top_c;
        request.d = config.top_d;
        request.tail_split = config.tail_split;
        request.seed = config.seed;
        let strategy = DiscoveryStrategy::Seeded { sm, request };
        let discovery = evaluate_discovery(scorer.as_ref(), &train, &test, &grid, &strategy)?;
        print_discovery("explore", &discovery);
        report.push_discovery("explore", &discovery);
    }
    report.meta.wall_clock_s = started.elapsed().as_secs_f64();
    report.records.retain(|r| tasks.contains(r.task.as_str()));

    let prefix = args
        .out_prefix
        .clone()
        .unwrap_or_else(|| crate::artifacts::output_root().join(format!("{label}-{}", args.fold)));
    let text_path = resolve_out(Some(&PathBuf::from(format!("{}.report.txt", prefix.display()))), "")?;
    let tsv_path = PathBuf::from(format!("{}.report.tsv", prefix.display()));
    report.write_text(&text_path)?;
    report.write_tsv(&tsv_path)?;
    write_meta(
        &tsv_path,
        &config.hash(),
        &[
            ("train", &report.meta.train_fingerprint),
            ("test", &report.meta.test_fingerprint),
        ],
    )?;
    println!("report: {}", text_path.display());
    println!("report: {}", tsv_path.display());
    Ok(())
}

fn print_discovery(task: &str, d: &reco_core::eval::DiscoveryEvaluation) {
    let precision = d
        .global
        .precision
        .map_or_else(|| "n/a".to_string(), |p| format!("{p:.4}"));
    let ami = d
        .global
        .ami
        .map_or_else(|| "n/a".to_string(), |a| format!("{a:.4}"));
    println!(
        "{task}: precision={precision} ami={ami} smi={:.2} ({} recommendations to {} users)",
        d.global.smi, d.recommendations, d.users
    );
}
