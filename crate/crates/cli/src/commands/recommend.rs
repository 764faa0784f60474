//! `reco recommend` — Top-N lists for one user, full-catalog or seeded.

use std::path::PathBuf;

use clap::Args;
use reco_core::ratings::load_logs;
use reco_core::{
    full_catalog_top_n, recommend_top_n, Error, Result, ShortHeadSet, TailMode, TopNRequest,
    UserProfile,
};

use crate::config::Config;

use super::scorers::{load_artifacts, make_scorer, ScorerKind};

#[derive(Debug, Args)]
pub struct RecommendArgs {
    /// Training log file.
    #[arg(long)]
    train: PathBuf,
    /// Input format override: tsv or movielens.
    #[arg(long)]
    format: Option<String>,
    /// User to recommend for, by name.
    #[arg(long)]
    user: String,
    /// List length override.
    #[arg(long)]
    n: Option<usize>,
    /// Scorer: default, random, knn, gravity, or emulated.
    #[arg(long, default_value = "knn")]
    scorer: String,
    /// Similarity matrix artifact (scorer: knn).
    #[arg(long)]
    knn: Option<PathBuf>,
    /// Factor model artifact (scorer: gravity or emulated).
    #[arg(long)]
    gravity: Option<PathBuf>,
    /// Walk the similarity matrix from the user's own ratings instead of
    /// scoring the whole catalog.
    #[arg(long)]
    seeded: bool,
    /// Candidate popularity filter for the seeded walk:
    /// any, short-head, or long-tail.
    #[arg(long, default_value = "any")]
    tail: String,
    /// Downgrade artifact fingerprint mismatches to warnings.
    #[arg(long)]
    force: bool,
}

pub fn run(base: &Config, args: &RecommendArgs) -> Result<()> {
    let config = super::finish_config(
        base,
        &[
            ("format", args.format.clone()),
            ("top_n", args.n.map(|v| v.to_string())),
        ],
    )?;
    let kind: ScorerKind = args.scorer.parse()?;
    let tail: TailMode = args.tail.parse()?;

    let train = load_logs(&args.train, config.scale()?, config.format)?;
    let user = train
        .users()
        .get(&args.user)
        .ok_or_else(|| Error::UnknownUser(args.user.clone()))?;
    let profile = UserProfile::from_matrix(&train, user);

    let artifacts = load_artifacts(
        kind,
        args.knn.as_deref(),
        args.gravity.as_deref(),
        &train,
        &config,
        args.force,
        args.seeded,
    )?;
    let scorer = make_scorer(kind, &artifacts, &train, &config)?;

    let items = if args.seeded {
        let sm = artifacts.matrix.as_ref().ok_or_else(|| {
            Error::InvalidParam(
                "seeded recommendation walks a similarity matrix; use scorer knn, gravity, \
                 or emulated"
                    .into(),
            )
        })?;
        let mut request = TopNRequest::new(config.top_n);
        request.g = config.top_g;
        request.c = config.top_c;
        request.d = config.top_d;
        request.tail_mode = tail;
        request.tail_split = config.tail_split;
        request.seed = config.seed;
        let tails = (tail != TailMode::Any).then(|| ShortHeadSet::new(&train, config.tail_split));
        recommend_top_n(&profile, &request, sm, &train, scorer.as_ref(), tails.as_ref())?
    } else {
        full_catalog_top_n(&profile, config.top_n, scorer.as_ref(), &train)
    };

    println!(
        "top {} for {} ({}, {} rated items)",
        items.len(),
        args.user,
        scorer.label(),
        profile.len()
    );
    for (rank, item) in items.iter().enumerate() {
        let p = scorer.predict(&profile, *item);
        println!(
            "{:>3}. {}\tpredicted={:.3}\t{}",
            rank + 1,
            train.items().name(*item),
            p.value,
            match p.origin {
                reco_core::Origin::MainModel => "main-model",
                reco_core::Origin::DefaultPredictor => "default-predictor",
            }
        );
    }
    Ok(())
}
