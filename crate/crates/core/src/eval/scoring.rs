//! The decide/compare evaluation: rating accuracy and rank quality of a
//! scorer over a held-out test set, globally and per popularity segment.
//!
//! Every test log is predicted from the user's *train* profile. A log's
//! segment is fixed by train-set counts of its user and item. Preference
//! pairs (two items, one user) get the full user×item segment only when
//! both items sit in the same popularity class; pairs straddling the item
//! split are attributed to the user's activity side alone, so the
//! heavy/light marginals see every pair while the four cells see only the
//! unambiguous ones.

use std::time::Instant;

use rayon::prelude::*;

use super::metrics::{AccuracySums, InOutAccuracy, KahanSum, NdpmStats, PairCounts};
use crate::error::{Error, Result};
use crate::ids::same_universe;
use crate::predict::Scorer;
use crate::profile::UserProfile;
use crate::ratings::RatingsMatrix;
use crate::segments::{Segment, SegmentGrid};

/// Rank-quality breakdown. `by_user_activity` is indexed heavy = 0,
/// light = 1 and counts every strict-preference pair; the four segment
/// cells count only pairs whose items share a popularity class.
#[derive(Debug, Clone)]
pub struct RankingBreakdown {
    pub global: Option<NdpmStats>,
    pub per_segment: [Option<NdpmStats>; 4],
    pub by_user_activity: [Option<NdpmStats>; 2],
}

/// Output of [`evaluate_scoring`].
#[derive(Debug, Clone)]
pub struct ScoringEvaluation {
    pub scorer: String,
    pub accuracy: InOutAccuracy,
    pub accuracy_per_segment: [Option<InOutAccuracy>; 4],
    pub ranking: RankingBreakdown,
    /// Optional diagnostic: RMSE-out reweighted by inverse test-inclusion
    /// probability under the independence approximation
    /// `Prob((u,i) ∈ T) = K(u)/|T| · K(i)/|T|`. Never the headline number.
    pub rmse_estimated: Option<f64>,
    pub n_test: usize,
    pub wall_clock_s: f64,
    pub predictions_per_s: f64,
}

#[derive(Default)]
struct UserPartial {
    /// Accuracy sums per segment cell (every log lands in exactly one).
    cells: [AccuracySums; 4],
    /// Preference pairs split by the items' shared popularity class:
    /// index 0 popular×popular, 1 unpopular×unpopular.
    pairs_by_pop: [PairCounts; 2],
    /// All strict-preference pairs, item classes ignored.
    pairs_all: PairCounts,
    heavy: bool,
    /// Inverse-probability-weighted squared error (diagnostic).
    weighted_sq: f64,
    weight: f64,
}

/// Scores every test log with `scorer` (trained on `train` only) and folds
/// accuracy and ranking metrics globally and per segment.
///
/// Per-user work runs in parallel; the cross-user reduction is a
/// fixed-order compensated fold over users in id order, so results do not
/// depend on the worker count.
pub fn evaluate_scoring(
    scorer: &dyn Scorer,
    train: &RatingsMatrix,
    test: &RatingsMatrix,
    grid: &SegmentGrid,
) -> Result<ScoringEvaluation> {
    if test.is_empty() {
        return Err(Error::Empty("test set has no logs"));
    }
    if !same_universe(train.users(), test.users()) || !same_universe(train.items(), test.items())
    {
        return Err(Error::UniverseMismatch(
            "train and test must come from the same split".into(),
        ));
    }
    let started = Instant::now();
    let n_test_total = test.len() as f64;

    let partials: Vec<Option<UserPartial>> = (0..test.n_users() as u32)
        .into_par_iter()
        .map(|u| {
            let row = test.user_row(u);
            if row.is_empty() {
                return None;
            }
            let profile = UserProfile::from_matrix(train, u);
            let mut part = UserPartial { heavy: grid.is_heavy(u), ..UserPartial::default() };
            let mut truths = Vec::with_capacity(row.len());
            let mut preds = Vec::with_capacity(row.len());
            let mut popular = Vec::with_capacity(row.len());
            for entry in row {
                let p = scorer.predict(&profile, entry.other);
                let cell = grid.segment_of(u, entry.other).index();
                part.cells[cell].add(p.value, entry.rating, p.origin);
                let e = p.value - entry.rating;
                let w = n_test_total * n_test_total
                    / (test.user_count(u) as f64 * test.item_count(entry.other) as f64);
                part.weighted_sq += w * e * e;
                part.weight += w;
                truths.push(entry.rating);
                preds.push(p.value);
                popular.push(grid.is_popular(entry.other));
            }
            for a in 0..truths.len() {
                for b in (a + 1)..truths.len() {
                    if truths[a] == truths[b] {
                        continue;
                    }
                    let pair = pair_verdict(truths[a], truths[b], preds[a], preds[b]);
                    part.pairs_all += pair;
                    if popular[a] == popular[b] {
                        part.pairs_by_pop[usize::from(!popular[a])] += pair;
                    }
                }
            }
            Some(part)
        })
        .collect();

    // Fixed-order compensated reduction.
    let mut sq = [KahanSum::default(); 4];
    let mut abs = [KahanSum::default(); 4];
    let mut sq_in = [KahanSum::default(); 4];
    let mut abs_in = [KahanSum::default(); 4];
    let mut n = [0usize; 4];
    let mut n_main = [0usize; 4];
    let mut cell_pairs = [PairCounts::default(); 4];
    let mut activity_pairs = [PairCounts::default(); 2];
    let mut weighted_sq = KahanSum::default();
    let mut weight = KahanSum::default();
    for part in partials.iter().flatten() {
        for cell in 0..4 {
            sq[cell].add(part.cells[cell].sq);
            abs[cell].add(part.cells[cell].abs);
            sq_in[cell].add(part.cells[cell].sq_in);
            abs_in[cell].add(part.cells[cell].abs_in);
            n[cell] += part.cells[cell].n;
            n_main[cell] += part.cells[cell].n_main;
        }
        activity_pairs[usize::from(!part.heavy)] += part.pairs_all;
        for (pop_class, &pairs) in part.pairs_by_pop.iter().enumerate() {
            let seg = match (part.heavy, pop_class == 0) {
                (true, true) => Segment::HP,
                (true, false) => Segment::HU,
                (false, true) => Segment::LP,
                (false, false) => Segment::LU,
            };
            cell_pairs[seg.index()] += pairs;
        }
        weighted_sq.add(part.weighted_sq);
        weight.add(part.weight);
    }

    let cell_accuracy = |c: usize| -> Option<InOutAccuracy> {
        AccuracySums {
            sq: sq[c].total(),
            abs: abs[c].total(),
            n: n[c],
            sq_in: sq_in[c].total(),
            abs_in: abs_in[c].total(),
            n_main: n_main[c],
        }
        .finish()
    };
    let accuracy_per_segment =
        [cell_accuracy(0), cell_accuracy(1), cell_accuracy(2), cell_accuracy(3)];
    let accuracy = AccuracySums {
        sq: sq.iter().map(|k| k.total()).sum(),
        abs: abs.iter().map(|k| k.total()).sum(),
        n: n.iter().sum(),
        sq_in: sq_in.iter().map(|k| k.total()).sum(),
        abs_in: abs_in.iter().map(|k| k.total()).sum(),
        n_main: n_main.iter().sum(),
    }
    .finish()
    .expect("test set is non-empty");

    let mut global_pairs = PairCounts::default();
    global_pairs += activity_pairs[0];
    global_pairs += activity_pairs[1];
    let ranking = RankingBreakdown {
        global: NdpmStats::from_counts(global_pairs),
        per_segment: cell_pairs.map(NdpmStats::from_counts),
        by_user_activity: activity_pairs.map(NdpmStats::from_counts),
    };

    let total_weight = weight.total();
    let wall_clock_s = started.elapsed().as_secs_f64();
    Ok(ScoringEvaluation {
        scorer: scorer.label(),
        accuracy,
        accuracy_per_segment,
        ranking,
        rmse_estimated: (total_weight > 0.0)
            .then(|| (weighted_sq.total() / total_weight).sqrt()),
        n_test: test.len(),
        wall_clock_s,
        predictions_per_s: if wall_clock_s > 0.0 {
            test.len() as f64 / wall_clock_s
        } else {
            f64::INFINITY
        },
    })
}

fn pair_verdict(truth_a: f64, truth_b: f64, pred_a: f64, pred_b: f64) -> PairCounts {
    let mut c = PairCounts { total: 1, ..PairCounts::default() };
    let diff = pred_a - pred_b;
    if diff == 0.0 {
        c.tied = 1;
    } else if (diff > 0.0) != (truth_a > truth_b) {
        c.contradictory = 1;
    }
    c
}
