//! Top-K neighbor search over the item-item similarity graph.
//!
//! One row (= one item) is computed by walking the item's raters and
//! accumulating pair sums against every co-rated item, so the cost is
//! proportional to the co-rating structure rather than n². Rows are
//! independent, which makes the search embarrassingly parallel, and the
//! per-row accumulation order is fixed by the sorted rating views, so
//! results do not depend on the worker count.

use rayon::prelude::*;

use super::matrix::{rank_row, SimilarityMatrix};
use super::measure::{sim_from_stats, ItemNorms, PairStats, SimilarityMeasure};
use crate::error::{Error, Result};
use crate::ratings::RatingsMatrix;

/// Builds the top-`k` neighbor lists under one measure.
pub fn knn_search(m: &RatingsMatrix, k: usize, measure: SimilarityMeasure) -> Result<SimilarityMatrix> {
    let mut out = knn_search_multi(m, k, &[measure])?;
    Ok(out.remove(0))
}

/// Builds top-`k` matrices for several measures in a single sweep: the
/// pair sums are accumulated once per row and each measure is evaluated
/// from the shared sums.
pub fn knn_search_multi(
    m: &RatingsMatrix,
    k: usize,
    measures: &[SimilarityMeasure],
) -> Result<Vec<SimilarityMatrix>> {
    if k == 0 {
        return Err(Error::InvalidParam("neighbor count k must be positive".into()));
    }
    if measures.is_empty() {
        return Err(Error::InvalidParam("no similarity measures requested".into()));
    }
    if m.is_empty() {
        return Err(Error::Empty("cannot build a similarity matrix from an empty rating set"));
    }
    let n = m.n_items();
    let norms = ItemNorms::new(m);
    let fingerprint = m.fingerprint();

    // rows_by_item[i] = one ranked row per measure.
    let rows_by_item: Vec<Vec<Vec<(u32, f64)>>> = (0..n as u32)
        .into_par_iter()
        .map_init(
            || (vec![PairStats::default(); n], Vec::<u32>::new()),
            |(scratch, touched), i| {
                accumulate_row(m, i, scratch, touched);
                let rows: Vec<Vec<(u32, f64)>> = measures
                    .iter()
                    .map(|&measure| {
                        let mut row: Vec<(u32, f64)> = touched
                            .iter()
                            .filter_map(|&j| {
                                let s = sim_from_stats(measure, &scratch[j as usize], &norms, i, j);
                                (s != 0.0).then_some((j, s))
                            })
                            .collect();
                        rank_row(&mut row, k);
                        row
                    })
                    .collect();
                for &j in touched.iter() {
                    scratch[j as usize] = PairStats::default();
                }
                touched.clear();
                rows
            },
        )
        .collect();

    Ok(measures
        .iter()
        .enumerate()
        .map(|(mi, &measure)| {
            let rows = rows_by_item.iter().map(|per_item| per_item[mi].clone()).collect();
            SimilarityMatrix::new(
                m.items().clone(),
                k,
                measure.token().to_string(),
                fingerprint.clone(),
                rows,
            )
        })
        .collect())
}

/// Accumulates [`PairStats`] for item `i` against every co-rated item.
/// `scratch` must be all-default on entry and is keyed by item id;
/// `touched` records which slots were written.
fn accumulate_row(m: &RatingsMatrix, i: u32, scratch: &mut [PairStats], touched: &mut Vec<u32>) {
    let mean_i = m.item_mean(i).unwrap_or(0.0);
    for rater in m.item_col(i) {
        let (u, ri) = (rater.other, rater.rating);
        let di = ri - mean_i;
        for e in m.user_row(u) {
            let j = e.other;
            if j == i {
                continue;
            }
            let s = &mut scratch[j as usize];
            if s.n_common == 0 {
                touched.push(j);
            }
            let rj = e.rating;
            let dj = rj - m.item_mean(j).unwrap_or(0.0);
            s.n_common += 1;
            s.dot_dev += di * dj;
            s.sq_dev_i += di * di;
            s.sq_dev_j += dj * dj;
            s.dot_raw += ri * rj;
            s.sq_raw_i += ri * ri;
            s.sq_raw_j += rj * rj;
        }
    }
}
