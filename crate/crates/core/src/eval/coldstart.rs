//! Cold-start simulation: how do collaborative, thematic, and hybrid-light
//! modeling behave as a service grows from a handful of users?
//!
//! For each target user count, a nested seeded sample of users is drawn
//! (smaller samples are prefixes of larger ones, so curves vary only by
//! the added users), their logs are split per the profile regime — long
//! profiles train on 90%, short profiles reverse that to 10% — and each
//! requested mode is trained and scored on the held-out logs.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::metrics::{rmse_in_out, InOutAccuracy};
use crate::catalog::DescriptorCatalog;
use crate::error::{Error, Result};
use crate::predict::{KnnScorer, Scorer, ScoringMode};
use crate::profile::UserProfile;
use crate::ratings::{split::mix64, split_train_test, RatingsMatrix};
use crate::similarity::{knn_search, SimilarityMeasure};

/// What the similarity model may be built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColdStartMode {
    /// Log-based similarity, mean-based scoring: pure usage signal.
    Collaborative,
    /// Catalog-descriptor similarity, mono-user scoring: no cross-user
    /// information at all.
    Thematic,
    /// Catalog-descriptor similarity with mean-based scoring: thematic
    /// edges anchored on collaborative means.
    HybridLight,
}

impl ColdStartMode {
    pub fn token(self) -> &'static str {
        match self {
            ColdStartMode::Collaborative => "collaborative",
            ColdStartMode::Thematic => "thematic",
            ColdStartMode::HybridLight => "hybrid-light",
        }
    }
}

impl std::fmt::Display for ColdStartMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

impl std::str::FromStr for ColdStartMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "collaborative" => Ok(ColdStartMode::Collaborative),
            "thematic" => Ok(ColdStartMode::Thematic),
            "hybrid-light" => Ok(ColdStartMode::HybridLight),
            other => Err(Error::InvalidParam(format!("unknown cold-start mode '{other}'"))),
        }
    }
}

/// Long profiles keep 90% of each user's logs for training; short
/// profiles reverse the split and train on 10%.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileRegime {
    Long,
    Short,
}

impl ProfileRegime {
    pub fn token(self) -> &'static str {
        match self {
            ProfileRegime::Long => "long",
            ProfileRegime::Short => "short",
        }
    }

    fn test_fraction(self) -> f64 {
        match self {
            ProfileRegime::Long => 0.1,
            ProfileRegime::Short => 0.9,
        }
    }
}

impl std::fmt::Display for ProfileRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

impl std::str::FromStr for ProfileRegime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "long" => Ok(ProfileRegime::Long),
            "short" => Ok(ProfileRegime::Short),
            other => Err(Error::InvalidParam(format!("unknown profile regime '{other}'"))),
        }
    }
}

/// One measured point of the growth curve.
#[derive(Debug, Clone)]
pub struct ColdStartPoint {
    pub users: usize,
    pub mode: ColdStartMode,
    pub regime: ProfileRegime,
    pub accuracy: InOutAccuracy,
    pub n_test: usize,
}

/// Mixed into the experiment seed so the user-sample shuffle is decoupled
/// from the train/test split drawn with the same seed.
pub const COLD_START_SAMPLE_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Runs the growth simulation and returns one point per
/// user-count × mode, in that nesting order.
///
/// `user_counts` must be strictly increasing (log-spaced in practice) and
/// must not exceed the number of users with logs. `k` is the neighbor
/// count for every similarity model.
pub fn cold_start_experiment(
    logs: &RatingsMatrix,
    catalog: &DescriptorCatalog,
    user_counts: &[usize],
    regime: ProfileRegime,
    modes: &[ColdStartMode],
    k: usize,
    seed: u64,
) -> Result<Vec<ColdStartPoint>> {
    if user_counts.is_empty() || modes.is_empty() {
        return Err(Error::Empty("nothing to simulate"));
    }
    if user_counts.windows(2).any(|w| w[0] >= w[1]) || user_counts[0] == 0 {
        return Err(Error::InvalidParam(
            "user counts must be positive and strictly increasing".into(),
        ));
    }
    let mut pool: Vec<u32> =
        (0..logs.n_users() as u32).filter(|&u| logs.user_count(u) > 0).collect();
    if *user_counts.last().unwrap() > pool.len() {
        return Err(Error::InvalidParam(format!(
            "largest user count {} exceeds the {} users with logs",
            user_counts.last().unwrap(),
            pool.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed ^ COLD_START_SAMPLE_SALT));
    pool.shuffle(&mut rng);

    // Thematic similarity does not depend on the sample; build it once.
    let needs_catalog =
        modes.iter().any(|m| *m != ColdStartMode::Collaborative);
    let thematic_sm = if needs_catalog {
        let descriptor_matrix = catalog.to_matrix_with_items(logs.items());
        if descriptor_matrix.is_empty() {
            return Err(Error::Empty("catalog covers none of the log items"));
        }
        Some(knn_search(&descriptor_matrix, k, SimilarityMeasure::Jaccard)?)
    } else {
        None
    };

    let mut points = Vec::with_capacity(user_counts.len() * modes.len());
    for &count in user_counts {
        let sample = &pool[..count];
        let sub = logs.restrict_to_users(sample);
        let (train, test) = split_train_test(&sub, regime.test_fraction(), seed)?;
        if test.is_empty() {
            log::warn!(
                "cold-start: no test logs at {count} users ({regime} regime); point skipped"
            );
            continue;
        }
        for &mode in modes {
            let collaborative_sm;
            let scorer: Box<dyn Scorer + '_> = match mode {
                ColdStartMode::Collaborative => {
                    collaborative_sm = knn_search(&train, k, SimilarityMeasure::WeightedPearson)?;
                    Box::new(KnnScorer::new(&collaborative_sm, &train, ScoringMode::MeanBased)?)
                }
                ColdStartMode::Thematic => Box::new(KnnScorer::new(
                    thematic_sm.as_ref().expect("built upfront"),
                    &train,
                    ScoringMode::MonoUser,
                )?),
                ColdStartMode::HybridLight => Box::new(KnnScorer::new(
                    thematic_sm.as_ref().expect("built upfront"),
                    &train,
                    ScoringMode::MeanBased,
                )?),
            };
            let mut tagged = Vec::with_capacity(test.len());
            for u in 0..test.n_users() as u32 {
                let row = test.user_row(u);
                if row.is_empty() {
                    continue;
                }
                let profile = UserProfile::from_matrix(&train, u);
                for entry in row {
                    let p = scorer.predict(&profile, entry.other);
                    tagged.push((p.value, entry.rating, p.origin));
                }
            }
            let accuracy = rmse_in_out(&tagged)?;
            points.push(ColdStartPoint {
                users: count,
                mode,
                regime,
                accuracy,
                n_test: test.len(),
            });
        }
    }
    if points.is_empty() {
        return Err(Error::Empty("every cold-start point was skipped for lack of test logs"));
    }
    Ok(points)
}
