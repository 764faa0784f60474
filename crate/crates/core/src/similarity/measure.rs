//! The eight pairwise similarity measures over sparse rating vectors.
//!
//! All measures are defined over non-null values only. The "extended"
//! variants share the classic numerators (over the common raters
//! `T_i ∩ T_j`) but normalize by each item's *full* rating set, which
//! penalizes thin overlaps; the composites weight a Pearson term by Jaccard.
//!
//! Conventions (applied uniformly): an empty intersection or a zero
//! denominator yields similarity 0 ("no evidence"), including the
//! zero-variance Pearson case.

use crate::error::{Error, Result};
use crate::ratings::RatingsMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimilarityMeasure {
    Pearson,
    ExtendedPearson,
    Cosine,
    ExtendedCosine,
    Jaccard,
    Mix,
    ExtendedMix,
    WeightedPearson,
}

impl SimilarityMeasure {
    pub const ALL: [SimilarityMeasure; 8] = [
        SimilarityMeasure::Pearson,
        SimilarityMeasure::ExtendedPearson,
        SimilarityMeasure::Cosine,
        SimilarityMeasure::ExtendedCosine,
        SimilarityMeasure::Jaccard,
        SimilarityMeasure::Mix,
        SimilarityMeasure::ExtendedMix,
        SimilarityMeasure::WeightedPearson,
    ];

    /// Canonical token used in CLI flags and artifact headers.
    pub fn token(self) -> &'static str {
        match self {
            SimilarityMeasure::Pearson => "pearson",
            SimilarityMeasure::ExtendedPearson => "extended-pearson",
            SimilarityMeasure::Cosine => "cosine",
            SimilarityMeasure::ExtendedCosine => "extended-cosine",
            SimilarityMeasure::Jaccard => "jaccard",
            SimilarityMeasure::Mix => "mix",
            SimilarityMeasure::ExtendedMix => "extended-mix",
            SimilarityMeasure::WeightedPearson => "wpearson",
        }
    }
}

impl std::fmt::Display for SimilarityMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

impl std::str::FromStr for SimilarityMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pearson" => Ok(SimilarityMeasure::Pearson),
            "extended-pearson" | "epearson" => Ok(SimilarityMeasure::ExtendedPearson),
            "cosine" => Ok(SimilarityMeasure::Cosine),
            "extended-cosine" | "ecosine" => Ok(SimilarityMeasure::ExtendedCosine),
            "jaccard" => Ok(SimilarityMeasure::Jaccard),
            "mix" => Ok(SimilarityMeasure::Mix),
            "extended-mix" | "emix" => Ok(SimilarityMeasure::ExtendedMix),
            "wpearson" | "weighted-pearson" => Ok(SimilarityMeasure::WeightedPearson),
            other => Err(Error::InvalidParam(format!(
                "unknown similarity measure '{other}'"
            ))),
        }
    }
}

/// Accumulated sums over one item pair's common raters, plus each side's
/// support size. Everything any of the eight measures needs.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct PairStats {
    pub n_common: u32,
    /// Σ (r_ui − r̄_i)(r_uj − r̄_j) over common raters.
    pub dot_dev: f64,
    /// Σ (r_ui − r̄_i)² over common raters.
    pub sq_dev_i: f64,
    pub sq_dev_j: f64,
    /// Σ r_ui · r_uj over common raters.
    pub dot_raw: f64,
    /// Σ r_ui² over common raters.
    pub sq_raw_i: f64,
    pub sq_raw_j: f64,
}

/// Per-item sums over the item's *entire* rating set, precomputed once:
/// the extended denominators and the supports.
#[derive(Debug, Clone)]
pub(crate) struct ItemNorms {
    pub count: Vec<u32>,
    pub mean: Vec<f64>,
    /// Σ (r − r̄_i)² over all ratings of i.
    pub full_sq_dev: Vec<f64>,
    /// Σ r² over all ratings of i.
    pub full_sq_raw: Vec<f64>,
}

impl ItemNorms {
    pub fn new(m: &RatingsMatrix) -> ItemNorms {
        let n = m.n_items();
        let mut norms = ItemNorms {
            count: Vec::with_capacity(n),
            mean: Vec::with_capacity(n),
            full_sq_dev: Vec::with_capacity(n),
            full_sq_raw: Vec::with_capacity(n),
        };
        for i in 0..n as u32 {
            let col = m.item_col(i);
            let mean = m.item_mean(i).unwrap_or(0.0);
            let (mut dev, mut raw) = (0.0f64, 0.0f64);
            for e in col {
                dev += (e.rating - mean) * (e.rating - mean);
                raw += e.rating * e.rating;
            }
            norms.count.push(col.len() as u32);
            norms.mean.push(mean);
            norms.full_sq_dev.push(dev);
            norms.full_sq_raw.push(raw);
        }
        norms
    }
}

fn ratio(num: f64, den_sq: f64) -> f64 {
    if den_sq > 0.0 {
        num / den_sq.sqrt()
    } else {
        0.0
    }
}

/// Evaluates one measure from pair sums and the two items' full-set norms.
pub(crate) fn sim_from_stats(
    measure: SimilarityMeasure,
    s: &PairStats,
    norms: &ItemNorms,
    i: u32,
    j: u32,
) -> f64 {
    if s.n_common == 0 {
        return 0.0;
    }
    let pearson = || ratio(s.dot_dev, s.sq_dev_i * s.sq_dev_j);
    let extended_pearson = || {
        ratio(
            s.dot_dev,
            norms.full_sq_dev[i as usize] * norms.full_sq_dev[j as usize],
        )
    };
    let jaccard = || {
        let union = norms.count[i as usize] + norms.count[j as usize] - s.n_common;
        if union == 0 {
            0.0
        } else {
            f64::from(s.n_common) / f64::from(union)
        }
    };
    match measure {
        SimilarityMeasure::Pearson => pearson(),
        SimilarityMeasure::ExtendedPearson => extended_pearson(),
        SimilarityMeasure::Cosine => ratio(s.dot_raw, s.sq_raw_i * s.sq_raw_j),
        SimilarityMeasure::ExtendedCosine => ratio(
            s.dot_raw,
            norms.full_sq_raw[i as usize] * norms.full_sq_raw[j as usize],
        ),
        SimilarityMeasure::Jaccard => jaccard(),
        SimilarityMeasure::Mix => jaccard() * (1.0 + pearson()) / 2.0,
        SimilarityMeasure::ExtendedMix => jaccard() * (1.0 + extended_pearson()) / 2.0,
        SimilarityMeasure::WeightedPearson => jaccard() * pearson(),
    }
}

/// Merges the two items' sorted rater lists into [`PairStats`].
pub(crate) fn pair_stats(m: &RatingsMatrix, norms: &ItemNorms, i: u32, j: u32) -> PairStats {
    let (a, b) = (m.item_col(i), m.item_col(j));
    let (mean_i, mean_j) = (norms.mean[i as usize], norms.mean[j as usize]);
    let mut s = PairStats::default();
    let (mut x, mut y) = (0usize, 0usize);
    while x < a.len() && y < b.len() {
        match a[x].other.cmp(&b[y].other) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                let (ri, rj) = (a[x].rating, b[y].rating);
                let (di, dj) = (ri - mean_i, rj - mean_j);
                s.n_common += 1;
                s.dot_dev += di * dj;
                s.sq_dev_i += di * di;
                s.sq_dev_j += dj * dj;
                s.dot_raw += ri * rj;
                s.sq_raw_i += ri * ri;
                s.sq_raw_j += rj * rj;
                x += 1;
                y += 1;
            }
        }
    }
    s
}

/// Similarity of one item pair under any measure. `i == j` is permitted
/// (self-similarity is 1 for Jaccard/Cosine, measure-dependent otherwise).
pub fn pair_similarity(
    m: &RatingsMatrix,
    measure: SimilarityMeasure,
    i: u32,
    j: u32,
) -> Result<f64> {
    let check = |id: u32| -> Result<()> {
        if (id as usize) < m.n_items() {
            Ok(())
        } else {
            Err(Error::UnknownItem(format!("#{id}")))
        }
    };
    check(i)?;
    check(j)?;
    let norms = ItemNorms::new(m);
    let stats = pair_stats(m, &norms, i, j);
    Ok(sim_from_stats(measure, &stats, &norms, i, j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratings::tests::d1;
    use SimilarityMeasure::*;

    fn sim(measure: SimilarityMeasure, i: &str, j: &str) -> f64 {
        let m = d1();
        let id = |n: &str| m.items().get(n).unwrap();
        pair_similarity(&m, measure, id(i), id(j)).unwrap()
    }

    fn close(a: f64, b: f64) {
        assert!((a - b).abs() < 5e-5, "{a} vs {b}");
    }

    #[test]
    fn pearson_on_desk_pair() {
        close(sim(Pearson, "i1", "i2"), 0.7071);
    }

    #[test]
    fn pearson_single_common_rater_bias() {
        // One common rater, both sides below their means: maximal similarity.
        close(sim(Pearson, "i1", "i3"), 1.0);
    }

    #[test]
    fn cosine_self_similarity_is_one() {
        for item in ["i1", "i2", "i3"] {
            close(sim(Cosine, item, item), 1.0);
            close(sim(Jaccard, item, item), 1.0);
        }
    }

    #[test]
    fn extended_pearson_on_desk_pair() {
        close(sim(ExtendedPearson, "i1", "i2"), 0.5);
    }

    #[test]
    fn extended_cosine_on_desk_pair() {
        close(sim(ExtendedCosine, "i1", "i2"), 23.0 / 23.9583);
    }

    #[test]
    fn jaccard_on_desk_pair() {
        close(sim(Jaccard, "i1", "i2"), 2.0 / 3.0);
    }

    #[test]
    fn composites_on_desk_pairs() {
        close(sim(Mix, "i1", "i2"), 0.5690);
        close(sim(ExtendedMix, "i1", "i2"), 0.5);
        close(sim(WeightedPearson, "i1", "i3"), 1.0 / 3.0);
    }

    #[test]
    fn disjoint_supports_give_zero_everywhere() {
        use crate::ratings::{RatingLog, RatingScale, RatingsMatrix};
        let m = RatingsMatrix::from_logs(
            vec![
                RatingLog::new("u1", "a", 5.0),
                RatingLog::new("u2", "b", 3.0),
            ],
            RatingScale::new(1.0, 5.0).unwrap(),
        )
        .unwrap();
        for measure in SimilarityMeasure::ALL {
            assert_eq!(pair_similarity(&m, measure, 0, 1).unwrap(), 0.0);
        }
    }

    #[test]
    fn zero_variance_pearson_is_zero() {
        use crate::ratings::{RatingLog, RatingScale, RatingsMatrix};
        // Both raters give item `a` the same value: no variance on the overlap.
        let m = RatingsMatrix::from_logs(
            vec![
                RatingLog::new("u1", "a", 4.0),
                RatingLog::new("u2", "a", 4.0),
                RatingLog::new("u1", "b", 5.0),
                RatingLog::new("u2", "b", 1.0),
            ],
            RatingScale::new(1.0, 5.0).unwrap(),
        )
        .unwrap();
        assert_eq!(pair_similarity(&m, Pearson, 0, 1).unwrap(), 0.0);
        assert_eq!(pair_similarity(&m, ExtendedPearson, 0, 1).unwrap(), 0.0);
        // Jaccard-weighted composites survive via their Jaccard factor.
        assert_eq!(pair_similarity(&m, Mix, 0, 1).unwrap(), 0.5);
    }

    #[test]
    fn unknown_item_errors() {
        let m = d1();
        assert!(pair_similarity(&m, Pearson, 0, 99).is_err());
    }
}
