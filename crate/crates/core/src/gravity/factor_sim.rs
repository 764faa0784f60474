//! Item-item similarity computed on the dense factor vectors of a trained
//! model — the cheap stand-in for a full KNN search over raw ratings.

use rayon::prelude::*;

use super::FactorModel;
use crate::error::{Error, Result};
use crate::similarity::SimilarityMatrix;

/// Similarity between dense factor vectors. The vectors have full support,
/// so the intersection-restricted and full-set variants coincide and only
/// the classic forms are offered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorMeasure {
    Pearson,
    Cosine,
    /// Negative euclidean distance: 0 for identical vectors, more negative
    /// the further apart. Ranks closest-first under the usual
    /// descending-weight order.
    NegEuclidean,
}

impl FactorMeasure {
    pub fn token(self) -> &'static str {
        match self {
            FactorMeasure::Pearson => "factor-pearson",
            FactorMeasure::Cosine => "factor-cosine",
            FactorMeasure::NegEuclidean => "factor-neg-euclidean",
        }
    }
}

impl std::fmt::Display for FactorMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

impl std::str::FromStr for FactorMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pearson" | "factor-pearson" => Ok(FactorMeasure::Pearson),
            "cosine" | "factor-cosine" => Ok(FactorMeasure::Cosine),
            "neg-euclidean" | "factor-neg-euclidean" => Ok(FactorMeasure::NegEuclidean),
            other => Err(Error::InvalidParam(format!("unknown factor measure '{other}'"))),
        }
    }
}

struct RowStats {
    mean: f64,
    /// Σ (x − mean)² over the vector.
    sq_dev: f64,
    /// Σ x² over the vector.
    sq_raw: f64,
}

fn row_stats(v: &[f64]) -> RowStats {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let mut sq_dev = 0.0;
    let mut sq_raw = 0.0;
    for &x in v {
        sq_dev += (x - mean) * (x - mean);
        sq_raw += x * x;
    }
    RowStats { mean, sq_dev, sq_raw }
}

fn pair_sim(measure: FactorMeasure, a: &[f64], b: &[f64], sa: &RowStats, sb: &RowStats) -> f64 {
    match measure {
        FactorMeasure::Pearson => {
            let den = (sa.sq_dev * sb.sq_dev).sqrt();
            if den > 0.0 {
                let dot: f64 = a
                    .iter()
                    .zip(b)
                    .map(|(&x, &y)| (x - sa.mean) * (y - sb.mean))
                    .sum();
                dot / den
            } else {
                0.0
            }
        }
        FactorMeasure::Cosine => {
            let den = (sa.sq_raw * sb.sq_raw).sqrt();
            if den > 0.0 {
                let dot: f64 = a.iter().zip(b).map(|(&x, &y)| x * y).sum();
                dot / den
            } else {
                0.0
            }
        }
        FactorMeasure::NegEuclidean => {
            let sq: f64 = a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum();
            -sq.sqrt()
        }
    }
}

/// Top-`k` item neighbors in factor space, over the items the model
/// actually saw during training (unseen rows are untrained noise and get
/// empty neighbor lists).
///
/// Pearson/Cosine follow the usual storage rule — similarity exactly 0
/// means "no edge". NegEuclidean keeps zeros: there a 0 is a perfect
/// match, not absence of evidence.
pub fn factor_similarity_matrix(
    model: &FactorModel,
    k: usize,
    measure: FactorMeasure,
) -> Result<SimilarityMatrix> {
    if k == 0 {
        return Err(Error::InvalidParam("neighbor count k must be positive".into()));
    }
    let n = model.items().len();
    let seen: Vec<u32> = (0..n as u32).filter(|&i| model.item_seen(i)).collect();
    if seen.is_empty() {
        return Err(Error::Empty("the model has no seen items to relate"));
    }
    let stats: Vec<Option<RowStats>> = (0..n as u32)
        .map(|i| model.item_seen(i).then(|| row_stats(model.item_factors(i))))
        .collect();
    let keep_zero = measure == FactorMeasure::NegEuclidean;

    let rows: Vec<Vec<(u32, f64)>> = (0..n as u32)
        .into_par_iter()
        .map(|i| {
            let Some(si) = &stats[i as usize] else {
                return Vec::new();
            };
            let vi = model.item_factors(i);
            let mut row: Vec<(u32, f64)> = seen
                .iter()
                .filter(|&&j| j != i)
                .filter_map(|&j| {
                    let sj = stats[j as usize].as_ref().expect("seen items have stats");
                    let s = pair_sim(measure, vi, model.item_factors(j), si, sj);
                    (keep_zero || s != 0.0).then_some((j, s))
                })
                .collect();
            crate::similarity::rank_row(&mut row, k);
            row
        })
        .collect();

    Ok(SimilarityMatrix::new(
        model.items().clone(),
        k,
        measure.token().to_string(),
        model.source_fingerprint().to_string(),
        rows,
    ))
}
