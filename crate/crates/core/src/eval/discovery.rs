//! The discover/explore evaluation: Top-N recommendation quality judged by
//! relevance precision and catalog-normalized impact.
//!
//! Each test user receives a Top-N list built from their *train* profile.
//! Only recommendations the test set can judge count: the evaluable set H
//! holds the recommended (user, item) pairs that carry a test rating. A
//! pair is relevant when that rating reaches the user's train mean, and
//! its impact is the catalog-size-normalized inverse train frequency of
//! the item, signed by the same relevance rule.

use std::time::Instant;

use rayon::prelude::*;

use super::metrics::{impact_of, precision_from_counts, KahanSum, PrecisionStats};
use crate::error::{Error, Result};
use crate::ids::same_universe;
use crate::predict::Scorer;
use crate::profile::UserProfile;
use crate::ratings::RatingsMatrix;
use crate::segments::SegmentGrid;
use crate::similarity::SimilarityMatrix;
use crate::topn::{full_catalog_top_n, recommend_top_n, TopNRequest};

/// How each user's Top-N list is produced.
pub enum DiscoveryStrategy<'a> {
    /// Rank the entire catalog minus the profile and keep the best `n` —
    /// the discover task.
    FullCatalog { n: usize },
    /// Seed-based candidate walk with diversity draw — the explore task.
    /// The request's own `n` is the list size.
    Seeded { sm: &'a SimilarityMatrix, request: TopNRequest },
}

impl DiscoveryStrategy<'_> {
    fn n(&self) -> usize {
        match self {
            DiscoveryStrategy::FullCatalog { n } => *n,
            DiscoveryStrategy::Seeded { request, .. } => request.n,
        }
    }
}

/// Precision and impact tallies for one slice of the evaluable set.
#[derive(Debug, Clone, Copy, Default)]
pub struct DiscoveryCell {
    /// |H| for this slice: recommended pairs with a test rating.
    pub evaluable: usize,
    /// Evaluable pairs rated at or above the user's train mean.
    pub relevant: usize,
    /// Sum of signed impacts over the slice.
    pub smi: f64,
    /// relevant/evaluable; absent when nothing was evaluable.
    pub precision: Option<f64>,
    /// smi/evaluable; absent when nothing was evaluable.
    pub ami: Option<f64>,
}

impl DiscoveryCell {
    pub fn precision_stats(&self) -> Option<PrecisionStats> {
        precision_from_counts(self.relevant, self.evaluable, None)
    }
}

/// Output of [`evaluate_discovery`].
#[derive(Debug, Clone)]
pub struct DiscoveryEvaluation {
    pub scorer: String,
    pub global: DiscoveryCell,
    pub per_segment: [DiscoveryCell; 4],
    /// Requested list length.
    pub n: usize,
    /// Total recommendations issued (≤ n per user).
    pub recommendations: usize,
    /// Users who received a non-empty list.
    pub users: usize,
    /// Users skipped because no train mean exists to judge relevance.
    pub users_unjudgeable: usize,
    pub wall_clock_s: f64,
}

#[derive(Default)]
struct UserPartial {
    evaluable: [usize; 4],
    relevant: [usize; 4],
    smi: [f64; 4],
    recommendations: usize,
    served: bool,
    unjudgeable: bool,
}

/// Builds a Top-N list per test user and tallies precision and impact,
/// globally and per user×item segment.
///
/// Invariants inherited from the list builders: recommendations never
/// repeat a profile item, so H never contains a train-known pair.
pub fn evaluate_discovery(
    scorer: &dyn Scorer,
    train: &RatingsMatrix,
    test: &RatingsMatrix,
    grid: &SegmentGrid,
    strategy: &DiscoveryStrategy<'_>,
) -> Result<DiscoveryEvaluation> {
    if test.is_empty() {
        return Err(Error::Empty("test set has no logs"));
    }
    if !same_universe(train.users(), test.users()) || !same_universe(train.items(), test.items())
    {
        return Err(Error::UniverseMismatch(
            "train and test must come from the same split".into(),
        ));
    }
    if let DiscoveryStrategy::Seeded { sm, request } = strategy {
        request.validate()?;
        if !same_universe(sm.items(), train.items()) {
            return Err(Error::UniverseMismatch(
                "similarity matrix does not cover the train items".into(),
            ));
        }
    }
    if strategy.n() == 0 {
        return Err(Error::InvalidParam("top-n size must be positive".into()));
    }
    let started = Instant::now();
    let catalog_size = train.n_items();

    let partials: Vec<Option<UserPartial>> = (0..test.n_users() as u32)
        .into_par_iter()
        .map(|u| {
            let row = test.user_row(u);
            if row.is_empty() {
                return None;
            }
            let profile = UserProfile::from_matrix(train, u);
            let recs = match strategy {
                DiscoveryStrategy::FullCatalog { n } => {
                    full_catalog_top_n(&profile, *n, scorer, train)
                }
                DiscoveryStrategy::Seeded { sm, request } => {
                    recommend_top_n(&profile, request, sm, train, scorer, None)
                        .expect("request validated upfront")
                }
            };
            let mut part = UserPartial {
                recommendations: recs.len(),
                served: !recs.is_empty(),
                ..UserPartial::default()
            };
            let Some(mean) = train.user_mean(u) else {
                // No train mean — the relevance rule cannot label this
                // user's pairs, so none are evaluable.
                part.unjudgeable = true;
                return Some(part);
            };
            for item in recs {
                let Some(truth) = test.rating(u, item) else { continue };
                let cell = grid.segment_of(u, item).index();
                let liked = truth >= mean;
                part.evaluable[cell] += 1;
                part.relevant[cell] += usize::from(liked);
                part.smi[cell] += impact_of(catalog_size, train.item_count(item), liked);
            }
            Some(part)
        })
        .collect();

    // Fixed-order reduction.
    let mut evaluable = [0usize; 4];
    let mut relevant = [0usize; 4];
    let mut smi = [KahanSum::default(); 4];
    let mut recommendations = 0usize;
    let mut users = 0usize;
    let mut users_unjudgeable = 0usize;
    for part in partials.iter().flatten() {
        for cell in 0..4 {
            evaluable[cell] += part.evaluable[cell];
            relevant[cell] += part.relevant[cell];
            smi[cell].add(part.smi[cell]);
        }
        recommendations += part.recommendations;
        users += usize::from(part.served);
        users_unjudgeable += usize::from(part.unjudgeable);
    }

    let cell = |c: usize| -> DiscoveryCell {
        make_cell(evaluable[c], relevant[c], smi[c].total())
    };
    let per_segment = [cell(0), cell(1), cell(2), cell(3)];
    let global = make_cell(
        evaluable.iter().sum(),
        relevant.iter().sum(),
        smi.iter().map(|k| k.total()).sum(),
    );

    Ok(DiscoveryEvaluation {
        scorer: scorer.label(),
        global,
        per_segment,
        n: strategy.n(),
        recommendations,
        users,
        users_unjudgeable,
        wall_clock_s: started.elapsed().as_secs_f64(),
    })
}

fn make_cell(evaluable: usize, relevant: usize, smi: f64) -> DiscoveryCell {
    DiscoveryCell {
        evaluable,
        relevant,
        smi,
        precision: (evaluable > 0).then(|| relevant as f64 / evaluable as f64),
        ami: (evaluable > 0).then(|| smi / evaluable as f64),
    }
}
