//! Shared scorer construction for `evaluate` and `recommend`.
//!
//! Two phases keep the borrows simple: [`load_artifacts`] owns whatever
//! files back the scorer (verifying their source fingerprints against the
//! training data actually supplied), then [`make_scorer`] borrows from the
//! loaded artifacts.

use std::path::Path;

use reco_core::{
    factor_similarity_matrix, DefaultMode, DefaultScorer, Error, FactorModel, GravityScorer,
    KnnScorer, RandomScorer, RatingsMatrix, Result, Scorer, SimilarityMatrix,
};

use crate::artifacts::verify_source;
use crate::config::Config;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScorerKind {
    Default,
    Random,
    Knn,
    Gravity,
    /// A factor model driven through the neighborhood scorer: item-item
    /// similarities are computed in factor space, then scoring proceeds
    /// exactly as for a rating-overlap matrix.
    Emulated,
}

impl std::str::FromStr for ScorerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" | "default-predictor" => Ok(ScorerKind::Default),
            "random" => Ok(ScorerKind::Random),
            "knn" => Ok(ScorerKind::Knn),
            "gravity" => Ok(ScorerKind::Gravity),
            "emulated" => Ok(ScorerKind::Emulated),
            other => Err(Error::InvalidParam(format!(
                "unknown scorer '{other}' (expected default, random, knn, gravity, or emulated)"
            ))),
        }
    }
}

/// Everything a scorer may borrow, owned in one place.
#[derive(Default)]
pub struct Artifacts {
    pub matrix: Option<SimilarityMatrix>,
    pub model: Option<FactorModel>,
}

/// Loads and verifies the artifacts `kind` needs. `need_matrix` forces a
/// factor-space similarity matrix to exist even for the plain gravity
/// scorer (seeded recommendation and the explore task walk a matrix).
pub fn load_artifacts(
    kind: ScorerKind,
    knn_path: Option<&Path>,
    gravity_path: Option<&Path>,
    train: &RatingsMatrix,
    config: &Config,
    force: bool,
    need_matrix: bool,
) -> Result<Artifacts> {
    let mut artifacts = Artifacts::default();
    match kind {
        ScorerKind::Default | ScorerKind::Random => {}
        ScorerKind::Knn => {
            let path = knn_path.ok_or_else(|| {
                Error::InvalidParam("--knn <matrix file> is required for this scorer".into())
            })?;
            let raw = SimilarityMatrix::import(path)?;
            verify_source("similarity matrix", raw.source_fingerprint(), &train.fingerprint(), force)?;
            artifacts.matrix = Some(raw.remap(train.items()));
        }
        ScorerKind::Gravity | ScorerKind::Emulated => {
            let path = gravity_path.ok_or_else(|| {
                Error::InvalidParam("--gravity <model file> is required for this scorer".into())
            })?;
            let model = FactorModel::load(path)?;
            verify_source("factor model", model.source_fingerprint(), &train.fingerprint(), force)?;
            if kind == ScorerKind::Emulated || need_matrix {
                let sm = factor_similarity_matrix(&model, config.knn_k, config.factor_measure)?;
                artifacts.matrix = Some(sm.remap(train.items()));
            }
            artifacts.model = Some(model);
        }
    }
    Ok(artifacts)
}

/// Builds the scorer over the loaded artifacts.
pub fn make_scorer<'a>(
    kind: ScorerKind,
    artifacts: &'a Artifacts,
    train: &'a RatingsMatrix,
    config: &Config,
) -> Result<Box<dyn Scorer + 'a>> {
    Ok(match kind {
        ScorerKind::Default => Box::new(DefaultScorer::new(train, DefaultMode::Collaborative)),
        ScorerKind::Random => Box::new(RandomScorer::new(train.scale(), config.seed)),
        ScorerKind::Knn | ScorerKind::Emulated => {
            let sm = artifacts.matrix.as_ref().expect("loaded for this kind");
            Box::new(KnnScorer::new(sm, train, config.scoring)?)
        }
        ScorerKind::Gravity => {
            let model = artifacts.model.as_ref().expect("loaded for this kind");
            Box::new(GravityScorer::new(model, train))
        }
    })
}
