//! Train/test splitting and k-fold cross validation.
//!
//! The default split is per-user stratified: every user contributes
//! `round(|S_u| · test_fraction)` logs to the test side (capped at
//! `|S_u| − 1` for users with at least two logs), so test users always keep
//! a train profile. A global uniform split is available for sensitivity
//! checks. Both are deterministic in (input, seed) and independent of
//! thread count: each user draws from its own seeded generator.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::{LogDate, RatingsMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitStrategy {
    #[default]
    PerUser,
    Global,
}

impl std::str::FromStr for SplitStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-user" => Ok(SplitStrategy::PerUser),
            "global" => Ok(SplitStrategy::Global),
            other => Err(Error::InvalidParam(format!(
                "unknown split strategy '{other}' (expected per-user or global)"
            ))),
        }
    }
}

/// SplitMix64 — used to derive independent per-user stream seeds.
pub(crate) fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn user_rng(seed: u64, user: u32) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix64(seed ^ mix64(u64::from(user).wrapping_add(1))))
}

type Triple = (u32, u32, f64, Option<LogDate>);

/// Per-user stratified split (the default strategy).
pub fn split_train_test(
    m: &RatingsMatrix,
    test_fraction: f64,
    seed: u64,
) -> Result<(RatingsMatrix, RatingsMatrix)> {
    split_train_test_with(m, test_fraction, seed, SplitStrategy::PerUser)
}

pub fn split_train_test_with(
    m: &RatingsMatrix,
    test_fraction: f64,
    seed: u64,
    strategy: SplitStrategy,
) -> Result<(RatingsMatrix, RatingsMatrix)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidParam(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let mut train: Vec<Triple> = Vec::with_capacity(m.len());
    let mut test: Vec<Triple> = Vec::new();
    match strategy {
        SplitStrategy::PerUser => {
            for u in 0..m.n_users() as u32 {
                let row = m.user_row(u);
                if row.is_empty() {
                    continue;
                }
                let mut order: Vec<usize> = (0..row.len()).collect();
                order.shuffle(&mut user_rng(seed, u));
                let mut n_test = (row.len() as f64 * test_fraction).round() as usize;
                if row.len() >= 2 {
                    n_test = n_test.min(row.len() - 1);
                }
                n_test = n_test.min(row.len());
                for (pos, &idx) in order.iter().enumerate() {
                    let e = row[idx];
                    let triple = (u, e.other, e.rating, e.date);
                    if pos < n_test {
                        test.push(triple);
                    } else {
                        train.push(triple);
                    }
                }
            }
        }
        SplitStrategy::Global => {
            let mut all: Vec<Triple> = Vec::with_capacity(m.len());
            for u in 0..m.n_users() as u32 {
                for e in m.user_row(u) {
                    all.push((u, e.other, e.rating, e.date));
                }
            }
            all.shuffle(&mut ChaCha8Rng::seed_from_u64(mix64(seed)));
            let n_test = (all.len() as f64 * test_fraction).round() as usize;
            let n_test = n_test.min(all.len());
            test.extend_from_slice(&all[..n_test]);
            train.extend_from_slice(&all[n_test..]);
        }
    }
    let build = |triples: Vec<Triple>| {
        RatingsMatrix::from_parts(
            Arc::clone(m.users()),
            Arc::clone(m.items()),
            triples,
            m.scale(),
        )
    };
    Ok((build(train), build(test)))
}

/// Per-user k-fold partition: fold `f`'s test set is block `f`, its train
/// set everything else. Users with fewer than `k` logs appear in fewer than
/// `k` test folds but are never dropped.
pub fn kfold(m: &RatingsMatrix, k: usize, seed: u64) -> Result<Vec<(RatingsMatrix, RatingsMatrix)>> {
    if k < 2 {
        return Err(Error::InvalidParam(format!("kfold requires k >= 2, got {k}")));
    }
    // fold_of[user][position in shuffled profile] -> fold index
    let mut assignment: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m.n_users()];
    for u in 0..m.n_users() as u32 {
        let row = m.user_row(u);
        if row.is_empty() {
            continue;
        }
        let mut order: Vec<usize> = (0..row.len()).collect();
        order.shuffle(&mut user_rng(seed, u));
        assignment[u as usize] = order
            .iter()
            .enumerate()
            .map(|(pos, &idx)| (idx, pos % k))
            .collect();
    }
    let mut folds = Vec::with_capacity(k);
    for fold in 0..k {
        let mut train: Vec<Triple> = Vec::new();
        let mut test: Vec<Triple> = Vec::new();
        for (u, rows) in assignment.iter().enumerate() {
            let row = m.user_row(u as u32);
            for &(idx, f) in rows {
                let e = row[idx];
                let triple = (u as u32, e.other, e.rating, e.date);
                if f == fold {
                    test.push(triple);
                } else {
                    train.push(triple);
                }
            }
        }
        let build = |triples: Vec<Triple>| {
            RatingsMatrix::from_parts(
                Arc::clone(m.users()),
                Arc::clone(m.items()),
                triples,
                m.scale(),
            )
        };
        folds.push((build(train), build(test)));
    }
    Ok(folds)
}
