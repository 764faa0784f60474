//! Accuracy, ranking, relevance, and impact metric primitives.
//!
//! Everything here is a pure fold over prediction lists. The aggregating
//! evaluators combine per-user partial counts computed with these
//! primitives, so each formula lives in exactly one place.

use crate::error::{Error, Result};
use crate::predict::Origin;

/// Kahan–Babuška compensated accumulator: keeps squared-error sums honest
/// when a hundred million terms stream through.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(self) -> f64 {
        self.sum + self.compensation
    }
}

fn check_paired(predictions: &[f64], truths: &[f64]) -> Result<()> {
    if predictions.is_empty() {
        return Err(Error::Empty("no predictions to score"));
    }
    if predictions.len() != truths.len() {
        return Err(Error::InvalidParam(format!(
            "{} predictions vs {} truths",
            predictions.len(),
            truths.len()
        )));
    }
    Ok(())
}

/// Root-mean-squared error between paired lists.
pub fn rmse(predictions: &[f64], truths: &[f64]) -> Result<f64> {
    check_paired(predictions, truths)?;
    let mut acc = KahanSum::default();
    for (&p, &t) in predictions.iter().zip(truths) {
        acc.add((p - t) * (p - t));
    }
    Ok((acc.total() / predictions.len() as f64).sqrt())
}

/// Mean absolute error between paired lists.
pub fn mae(predictions: &[f64], truths: &[f64]) -> Result<f64> {
    check_paired(predictions, truths)?;
    let mut acc = KahanSum::default();
    for (&p, &t) in predictions.iter().zip(truths) {
        acc.add((p - t).abs());
    }
    Ok(acc.total() / predictions.len() as f64)
}

/// Error accounting split by prediction origin: the `out` figures cover
/// every prediction (fallbacks included), the `in` figures only those the
/// main model answered itself. Coverage is the main-model fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InOutAccuracy {
    pub rmse_out: f64,
    pub mae_out: f64,
    /// Absent when the main model answered nothing.
    pub rmse_in: Option<f64>,
    pub mae_in: Option<f64>,
    pub coverage: f64,
    /// Total predictions scored.
    pub n: usize,
    /// Predictions answered by the main model.
    pub n_main: usize,
}

/// Computes [`InOutAccuracy`] from `(prediction, truth, origin)` triples.
pub fn rmse_in_out(tagged: &[(f64, f64, Origin)]) -> Result<InOutAccuracy> {
    if tagged.is_empty() {
        return Err(Error::Empty("no predictions to score"));
    }
    let mut sums = AccuracySums::default();
    for &(p, t, origin) in tagged {
        sums.add(p, t, origin);
    }
    Ok(sums.finish().expect("non-empty input"))
}

/// Plain (un-compensated) error sums — the per-user partial that evaluators
/// combine with [`KahanSum`] across users.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct AccuracySums {
    pub sq: f64,
    pub abs: f64,
    pub n: usize,
    pub sq_in: f64,
    pub abs_in: f64,
    pub n_main: usize,
}

impl AccuracySums {
    pub(crate) fn add(&mut self, prediction: f64, truth: f64, origin: Origin) {
        let e = prediction - truth;
        self.sq += e * e;
        self.abs += e.abs();
        self.n += 1;
        if origin == Origin::MainModel {
            self.sq_in += e * e;
            self.abs_in += e.abs();
            self.n_main += 1;
        }
    }

    pub(crate) fn finish(&self) -> Option<InOutAccuracy> {
        if self.n == 0 {
            return None;
        }
        let n = self.n as f64;
        Some(InOutAccuracy {
            rmse_out: (self.sq / n).sqrt(),
            mae_out: self.abs / n,
            rmse_in: (self.n_main > 0).then(|| (self.sq_in / self.n_main as f64).sqrt()),
            mae_in: (self.n_main > 0).then(|| self.abs_in / self.n_main as f64),
            coverage: self.n_main as f64 / n,
            n: self.n,
            n_main: self.n_main,
        })
    }
}

/// Strict-preference pair counts for rank comparison: of the `total` item
/// pairs the user rated differently, how many did the system order the
/// wrong way round (`contradictory`) or score exactly equal (`tied`)?
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PairCounts {
    pub total: u64,
    pub contradictory: u64,
    pub tied: u64,
}

impl std::ops::AddAssign for PairCounts {
    fn add_assign(&mut self, rhs: PairCounts) {
        self.total += rhs.total;
        self.contradictory += rhs.contradictory;
        self.tied += rhs.tied;
    }
}

/// Enumerates one user's strict-preference pairs. Pairs with equal truth
/// ratings express no preference and are not counted; prediction ties are
/// exact value equality.
pub fn ndpm_counts(truths: &[f64], predictions: &[f64]) -> PairCounts {
    debug_assert_eq!(truths.len(), predictions.len());
    let mut c = PairCounts::default();
    for a in 0..truths.len() {
        for b in (a + 1)..truths.len() {
            if truths[a] == truths[b] {
                continue;
            }
            c.total += 1;
            let pred_diff = predictions[a] - predictions[b];
            if pred_diff == 0.0 {
                c.tied += 1;
            } else if (pred_diff > 0.0) != (truths[a] > truths[b]) {
                c.contradictory += 1;
            }
        }
    }
    c
}

/// Distance-based rank quality over strict-preference pairs: 0 is perfect
/// order, 1 fully reversed, 0.5 a constant predictor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NdpmStats {
    /// (2·contradictory + tied) / (2·total).
    pub ndpm: f64,
    /// Fraction of pairs ordered strictly correctly.
    pub percent_compatible: f64,
    pub pairs: PairCounts,
}

impl NdpmStats {
    /// `None` when there are no strict-preference pairs to judge.
    pub fn from_counts(pairs: PairCounts) -> Option<NdpmStats> {
        if pairs.total == 0 {
            return None;
        }
        let total = pairs.total as f64;
        let compatible = pairs.total - pairs.contradictory - pairs.tied;
        Some(NdpmStats {
            ndpm: (2.0 * pairs.contradictory as f64 + pairs.tied as f64) / (2.0 * total),
            percent_compatible: compatible as f64 / total,
            pairs,
        })
    }
}

/// Convenience wrapper: per-user NDPM straight from paired lists.
pub fn ndpm(truths: &[f64], predictions: &[f64]) -> Option<NdpmStats> {
    NdpmStats::from_counts(ndpm_counts(truths, predictions))
}

/// Relevance-precision over evaluable recommendations, with recall and F
/// only when a per-user relevant universe is actually known (rarely
/// meaningful offline).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionStats {
    pub precision: f64,
    pub relevant: usize,
    pub evaluable: usize,
    pub recall: Option<f64>,
    pub f_score: Option<f64>,
}

/// `None` when nothing was evaluable.
pub fn precision_from_counts(
    relevant: usize,
    evaluable: usize,
    relevant_universe: Option<usize>,
) -> Option<PrecisionStats> {
    if evaluable == 0 {
        return None;
    }
    let precision = relevant as f64 / evaluable as f64;
    let recall = match relevant_universe {
        Some(universe) if universe > 0 => Some(relevant as f64 / universe as f64),
        _ => None,
    };
    let f_score = recall.and_then(|r| {
        (precision + r > 0.0).then(|| 2.0 * precision * r / (precision + r))
    });
    Some(PrecisionStats { precision, relevant, evaluable, recall, f_score })
}

/// Measure of impact of one evaluable recommendation: the catalog-size-
/// normalized inverse train frequency of the item, signed by whether the
/// user liked it (rated at or above their train mean — a rating exactly on
/// the mean counts as liked). Never-rated items count as frequency 1.
pub fn impact_of(catalog_size: usize, train_count: usize, liked: bool) -> f64 {
    let magnitude = catalog_size as f64 / train_count.max(1) as f64;
    if liked {
        magnitude
    } else {
        -magnitude
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 5e-5
    }

    #[test]
    fn rmse_and_mae_on_a_two_point_example() {
        let r = rmse(&[4.0, 3.0], &[5.0, 3.0]).unwrap();
        assert!(close(r, 0.7071), "got {r}");
        let m = mae(&[4.0, 3.0], &[5.0, 3.0]).unwrap();
        assert!(close(m, 0.5), "got {m}");
    }

    #[test]
    fn perfect_predictions_score_zero() {
        assert_eq!(rmse(&[2.0, 4.5], &[2.0, 4.5]).unwrap(), 0.0);
        assert_eq!(mae(&[2.0, 4.5], &[2.0, 4.5]).unwrap(), 0.0);
    }

    #[test]
    fn empty_or_mismatched_inputs_are_refused() {
        assert!(rmse(&[], &[]).is_err());
        assert!(mae(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn rmse_is_permutation_invariant() {
        let a = rmse(&[1.0, 2.0, 5.0], &[2.0, 2.0, 3.0]).unwrap();
        let b = rmse(&[5.0, 1.0, 2.0], &[3.0, 2.0, 2.0]).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn kahan_survives_a_large_flat_sum() {
        let mut acc = KahanSum::default();
        acc.add(1e16);
        for _ in 0..10_000 {
            acc.add(1.0);
        }
        acc.add(-1e16);
        assert_eq!(acc.total(), 10_000.0);
    }

    #[test]
    fn in_out_split_by_origin() {
        // Main answers (4,5) and (3,3); fallback answers (1,3).
        let acc = rmse_in_out(&[
            (4.0, 5.0, Origin::MainModel),
            (3.0, 3.0, Origin::MainModel),
            (1.0, 3.0, Origin::DefaultPredictor),
        ])
        .unwrap();
        assert!(close(acc.rmse_in.unwrap(), 0.7071), "in {:?}", acc.rmse_in);
        assert!(close(acc.rmse_out, (5.0f64 / 3.0).sqrt()), "out {}", acc.rmse_out);
        assert!(close(acc.coverage, 2.0 / 3.0));
        assert_eq!((acc.n, acc.n_main), (3, 2));
    }

    #[test]
    fn all_main_collapses_in_onto_out() {
        let acc = rmse_in_out(&[(4.0, 5.0, Origin::MainModel), (3.0, 3.0, Origin::MainModel)])
            .unwrap();
        assert_eq!(acc.rmse_in.unwrap().to_bits(), acc.rmse_out.to_bits());
        assert_eq!(acc.coverage, 1.0);
    }

    #[test]
    fn all_fallback_leaves_in_absent() {
        let acc = rmse_in_out(&[(3.0, 4.0, Origin::DefaultPredictor)]).unwrap();
        assert!(acc.rmse_in.is_none());
        assert!(acc.mae_in.is_none());
        assert_eq!(acc.coverage, 0.0);
    }

    #[test]
    fn ndpm_counts_on_the_three_pair_example() {
        // Truths 5,3,1 with predictions 2,2,4: the (5,3) pair ties, the
        // other two reverse.
        let c = ndpm_counts(&[5.0, 3.0, 1.0], &[2.0, 2.0, 4.0]);
        assert_eq!(c, PairCounts { total: 3, contradictory: 2, tied: 1 });
        let stats = NdpmStats::from_counts(c).unwrap();
        assert!(close(stats.ndpm, 5.0 / 6.0), "ndpm {}", stats.ndpm);
        assert_eq!(stats.percent_compatible, 0.0);
    }

    #[test]
    fn ndpm_limit_cases() {
        let perfect = ndpm(&[5.0, 3.0, 1.0], &[4.8, 2.0, 1.5]).unwrap();
        assert_eq!(perfect.ndpm, 0.0);
        assert_eq!(perfect.percent_compatible, 1.0);
        let reversed = ndpm(&[5.0, 3.0, 1.0], &[1.5, 2.0, 4.8]).unwrap();
        assert_eq!(reversed.ndpm, 1.0);
        let constant = ndpm(&[5.0, 3.0, 1.0], &[2.0, 2.0, 2.0]).unwrap();
        assert_eq!(constant.ndpm, 0.5);
        assert_eq!(constant.percent_compatible, 0.0);
    }

    #[test]
    fn no_strict_preferences_means_no_ndpm() {
        assert!(ndpm(&[3.0, 3.0, 3.0], &[1.0, 2.0, 3.0]).is_none());
        assert!(ndpm(&[4.0], &[2.0]).is_none());
    }

    #[test]
    fn equal_truths_are_skipped_not_counted() {
        // Only the two pairs involving the 5 count; the (3,3) pair is no
        // preference at all.
        let c = ndpm_counts(&[5.0, 3.0, 3.0], &[1.0, 2.0, 2.5]);
        assert_eq!(c.total, 2);
        assert_eq!(c.contradictory, 2);
    }

    #[test]
    fn precision_counts_at_or_above_mean_as_relevant() {
        // User mean 3.5; evaluable recommendations rated {4, 4, 2}.
        let truths = [4.0, 4.0, 2.0];
        let relevant = truths.iter().filter(|&&r| r >= 3.5).count();
        let stats = precision_from_counts(relevant, truths.len(), None).unwrap();
        assert!(close(stats.precision, 2.0 / 3.0));
        assert!(stats.recall.is_none());
        assert!(stats.f_score.is_none());
    }

    #[test]
    fn precision_absent_without_evaluable_pairs() {
        assert!(precision_from_counts(0, 0, None).is_none());
    }

    #[test]
    fn recall_and_f_when_a_universe_is_supplied() {
        let stats = precision_from_counts(2, 4, Some(8)).unwrap();
        assert_eq!(stats.precision, 0.5);
        assert_eq!(stats.recall, Some(0.25));
        let f = stats.f_score.unwrap();
        assert!(close(f, 2.0 * 0.5 * 0.25 / 0.75), "f {f}");
    }

    #[test]
    fn impact_magnitude_and_sign() {
        // Catalog of 1000, item rated 50 times, liked.
        assert_eq!(impact_of(1000, 50, true), 20.0);
        // Disliked once-rated item: inverse frequency 1 before the catalog
        // factor, so MI/|I| = -1.
        let mi = impact_of(1000, 1, false);
        assert_eq!(mi, -1000.0);
        assert_eq!(mi / 1000.0, -1.0);
        // Never-rated items are guarded to frequency 1.
        assert_eq!(impact_of(300, 0, true), 300.0);
    }
}
