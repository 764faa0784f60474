//! Rating prediction: neighborhood scoring formulas, the default-predictor
//! cascade, preference-based scoring, and the [`Scorer`] abstraction that
//! the evaluation harness drives.

use crate::catalog::{AttributeDictionary, DescriptorCatalog};
use crate::error::{Error, Result};
use crate::profile::UserProfile;
use crate::ratings::{split::mix64, RatingScale, RatingsMatrix, ROBUST_MIN_SUPPORT};
use crate::similarity::SimilarityMatrix;

/// Which model produced a prediction. Accuracy is reported both over all
/// predictions and restricted to `MainModel` ones, so the fallback's
/// contribution stays visible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    MainModel,
    DefaultPredictor,
}

/// The profile item that argued loudest for a prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Explanation {
    pub item: u32,
    pub similarity: f64,
}

/// A predicted rating, clamped to the scale, with provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub value: f64,
    pub origin: Origin,
    /// Strongest similarity between the target and the profile, clamped
    /// into [0, 1]. Only main-model predictions carry one.
    pub confidence: Option<f64>,
    pub explanation: Option<Explanation>,
}

impl Prediction {
    /// A prediction that did not come from the main model: no confidence,
    /// no explanation, origin [`Origin::DefaultPredictor`].
    pub fn fallback(value: f64) -> Prediction {
        Prediction {
            value,
            origin: Origin::DefaultPredictor,
            confidence: None,
            explanation: None,
        }
    }
}

/// Fallback flavor: `Collaborative` may consult other users' rating means,
/// `MonoUser` must work from the profile alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefaultMode {
    Collaborative,
    MonoUser,
}

impl std::str::FromStr for DefaultMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "collaborative" => Ok(DefaultMode::Collaborative),
            "mono-user" => Ok(DefaultMode::MonoUser),
            other => Err(Error::InvalidParam(format!("unknown default mode '{other}'"))),
        }
    }
}

/// The model-free fallback cascade.
///
/// Collaborative mode averages the user mean with the item's *robust* mean
/// (an item mean only counts as robust with at least 10 ratings behind it),
/// then degrades to whichever mean survives, then to the global mean.
/// Mono-user mode may only use the profile: its cascade is the user mean,
/// then the scale midpoint.
pub fn default_predict(
    profile: &UserProfile,
    item: u32,
    m: &RatingsMatrix,
    mode: DefaultMode,
) -> Prediction {
    let scale = m.scale();
    let user_mean = profile.mean();
    let value = match mode {
        DefaultMode::MonoUser => user_mean.unwrap_or_else(|| scale.midpoint()),
        DefaultMode::Collaborative => {
            let robust = m.robust_item_mean(item, ROBUST_MIN_SUPPORT);
            match (user_mean, robust) {
                (Some(u), Some(i)) => (u + i) / 2.0,
                (Some(u), None) => u,
                (None, _) => m
                    .item_mean(item)
                    .or_else(|| m.global_mean())
                    .unwrap_or_else(|| scale.midpoint()),
            }
        }
    };
    Prediction::fallback(scale.clamp(value))
}

/// Accumulates the weighted sums shared by both scoring formulas and
/// remembers the strongest contributor.
struct NeighborhoodSums {
    num: f64,
    den: f64,
    best: Option<Explanation>,
}

fn scan_neighbors(
    profile: &UserProfile,
    sm: &SimilarityMatrix,
    item: u32,
    mut term: impl FnMut(u32, f64, f64) -> Option<f64>,
) -> NeighborhoodSums {
    let mut sums = NeighborhoodSums {
        num: 0.0,
        den: 0.0,
        best: None,
    };
    for &(j, sim) in sm.neighbors(item) {
        let Some(r_uj) = profile.rating_of(j) else {
            continue;
        };
        let Some(contribution) = term(j, sim, r_uj) else {
            continue;
        };
        sums.num += contribution;
        sums.den += sim.abs();
        if sums.best.map_or(true, |b| sim > b.similarity) {
            sums.best = Some(Explanation {
                item: j,
                similarity: sim,
            });
        }
    }
    sums
}

fn main_prediction(value: f64, scale: RatingScale, best: Option<Explanation>) -> Prediction {
    Prediction {
        value: scale.clamp(value),
        origin: Origin::MainModel,
        confidence: best.map(|b| b.similarity.clamp(0.0, 1.0)),
        explanation: best,
    }
}

/// Mean-based (multi-user) scoring: the item's mean plus the
/// similarity-weighted average deviation of the profile's neighbors from
/// their own means. Falls through to [`default_predict`] when the item has
/// no training mean or no neighbor overlaps the profile.
pub fn predict_mean_based(
    profile: &UserProfile,
    item: u32,
    sm: &SimilarityMatrix,
    m: &RatingsMatrix,
) -> Prediction {
    let Some(item_mean) = m.item_mean(item) else {
        return default_predict(profile, item, m, DefaultMode::Collaborative);
    };
    // A neighbor without a training mean carries no deviation signal: it is
    // skipped outright, contributing to neither sum.
    let sums = scan_neighbors(profile, sm, item, |j, sim, r_uj| {
        m.item_mean(j).map(|mean_j| sim * (r_uj - mean_j))
    });
    if sums.den > 0.0 {
        main_prediction(item_mean + sums.num / sums.den, m.scale(), sums.best)
    } else {
        default_predict(profile, item, m, DefaultMode::Collaborative)
    }
}

/// Mono-user scoring: a similarity-weighted average of the profile's own
/// ratings. Uses nothing but the profile and the similarity matrix, so it
/// also serves embedded/thematic deployments; its fallback is the
/// profile mean, then the scale midpoint.
pub fn predict_mono_user(
    profile: &UserProfile,
    item: u32,
    sm: &SimilarityMatrix,
    scale: RatingScale,
) -> Prediction {
    let sums = scan_neighbors(profile, sm, item, |_j, sim, r_uj| Some(sim * r_uj));
    if sums.den > 0.0 {
        main_prediction(sums.num / sums.den, scale, sums.best)
    } else {
        let value = profile.mean().unwrap_or_else(|| scale.midpoint());
        Prediction::fallback(scale.clamp(value))
    }
}

/// A user's explicit tastes over descriptors, on an asymmetric scale: the
/// floor sits at −100× the ceiling, so a single veto (a descriptor pinned
/// to the floor) drags any blend of likes decisively negative.
#[derive(Debug, Clone)]
pub struct PreferenceProfile {
    max: f64,
    prefs: std::collections::HashMap<String, f64>,
}

impl PreferenceProfile {
    /// `max` is the strongest positive preference; the floor is −100·max.
    pub fn new(max: f64) -> Result<PreferenceProfile> {
        if !(max.is_finite() && max > 0.0) {
            return Err(Error::InvalidParam(format!(
                "preference ceiling must be positive and finite, got {max}"
            )));
        }
        Ok(PreferenceProfile {
            max,
            prefs: std::collections::HashMap::new(),
        })
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn min(&self) -> f64 {
        -100.0 * self.max
    }

    /// Records a preference for a descriptor (named `attribute=value`).
    pub fn set(&mut self, descriptor: &str, preference: f64) -> Result<()> {
        if !(self.min()..=self.max).contains(&preference) {
            return Err(Error::InvalidParam(format!(
                "preference {preference} for '{descriptor}' outside [{}, {}]",
                self.min(),
                self.max
            )));
        }
        self.prefs.insert(descriptor.to_string(), preference);
        Ok(())
    }

    /// Pins a descriptor to the floor.
    pub fn veto(&mut self, descriptor: &str) {
        let floor = self.min();
        self.prefs.insert(descriptor.to_string(), floor);
    }

    pub fn get(&self, descriptor: &str) -> Option<f64> {
        self.prefs.get(descriptor).copied()
    }

    pub fn len(&self) -> usize {
        self.prefs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefs.is_empty()
    }
}

/// Scores an item directly from preferences: the mean of the user's
/// preference for each descriptor of the item, weighted by descriptor
/// weight times the descriptor's attribute weight. `None` when no
/// descriptor of the item appears in the preferences (or all weights
/// vanish) — preference scoring abstains rather than guesses.
pub fn predict_from_preferences(
    prefs: &PreferenceProfile,
    item: u32,
    catalog: &DescriptorCatalog,
    dict: &AttributeDictionary,
) -> Option<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for d in catalog.item_descriptors(item) {
        let name = catalog.descriptors().name(d.descriptor);
        let Some(p) = prefs.get(name) else { continue };
        let attr = catalog.attributes().name(catalog.attribute_of(d.descriptor));
        let w = d.weight * dict.weight(attr);
        num += p * w;
        den += w;
    }
    (den > 0.0).then(|| num / den)
}

/// Anything that can score (profile, item) pairs. Scorers are pure given
/// their inputs, so the harness may call them from many threads at once.
pub trait Scorer: Sync {
    fn predict(&self, profile: &UserProfile, item: u32) -> Prediction;

    /// Short model tag for reports ("knn-mean-based", "gravity", ...).
    fn label(&self) -> String;
}

/// Which neighborhood formula a [`KnnScorer`] applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoringMode {
    MeanBased,
    MonoUser,
}

impl std::str::FromStr for ScoringMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean-based" => Ok(ScoringMode::MeanBased),
            "mono-user" => Ok(ScoringMode::MonoUser),
            other => Err(Error::InvalidParam(format!("unknown scoring mode '{other}'"))),
        }
    }
}

/// Neighborhood scorer: a similarity matrix plus the training ratings it
/// must agree with.
pub struct KnnScorer<'a> {
    sm: &'a SimilarityMatrix,
    train: &'a RatingsMatrix,
    mode: ScoringMode,
}

impl<'a> KnnScorer<'a> {
    /// The matrix and the ratings must live on the same item universe —
    /// remap the matrix first if it was built elsewhere.
    pub fn new(
        sm: &'a SimilarityMatrix,
        train: &'a RatingsMatrix,
        mode: ScoringMode,
    ) -> Result<KnnScorer<'a>> {
        if !crate::ids::same_universe(sm.items(), train.items()) {
            return Err(Error::UniverseMismatch(
                "similarity matrix and training ratings index different item universes".into(),
            ));
        }
        Ok(KnnScorer { sm, train, mode })
    }
}

impl Scorer for KnnScorer<'_> {
    fn predict(&self, profile: &UserProfile, item: u32) -> Prediction {
        match self.mode {
            ScoringMode::MeanBased => predict_mean_based(profile, item, self.sm, self.train),
            ScoringMode::MonoUser => predict_mono_user(profile, item, self.sm, self.train.scale()),
        }
    }

    fn label(&self) -> String {
        let mode = match self.mode {
            ScoringMode::MeanBased => "mean-based",
            ScoringMode::MonoUser => "mono-user",
        };
        format!("knn-{}-{mode}", self.sm.measure())
    }
}

/// The fallback cascade as a standalone model (the baseline every real
/// model has to beat).
pub struct DefaultScorer<'a> {
    train: &'a RatingsMatrix,
    mode: DefaultMode,
}

impl<'a> DefaultScorer<'a> {
    pub fn new(train: &'a RatingsMatrix, mode: DefaultMode) -> DefaultScorer<'a> {
        DefaultScorer { train, mode }
    }
}

impl Scorer for DefaultScorer<'_> {
    fn predict(&self, profile: &UserProfile, item: u32) -> Prediction {
        default_predict(profile, item, self.train, self.mode)
    }

    fn label(&self) -> String {
        match self.mode {
            DefaultMode::Collaborative => "default".to_string(),
            DefaultMode::MonoUser => "default-mono-user".to_string(),
        }
    }
}

/// Uniform-random predictions on the rating scale, reproducible from the
/// seed: the value depends only on (seed, user, item), never on call
/// order or thread count. The floor of every comparison table.
pub struct RandomScorer {
    scale: RatingScale,
    seed: u64,
}

impl RandomScorer {
    pub fn new(scale: RatingScale, seed: u64) -> RandomScorer {
        RandomScorer { scale, seed }
    }
}

impl Scorer for RandomScorer {
    fn predict(&self, profile: &UserProfile, item: u32) -> Prediction {
        let u = profile.user().map_or(u64::MAX, u64::from);
        let h = mix64(self.seed ^ mix64(u ^ 0xA076_1D64_78BD_642F) ^ mix64(u64::from(item)).rotate_left(17));
        let unit = (h >> 11) as f64 / (1u64 << 53) as f64;
        Prediction {
            value: self.scale.min + unit * self.scale.width(),
            origin: Origin::MainModel,
            confidence: None,
            explanation: None,
        }
    }

    fn label(&self) -> String {
        "random".to_string()
    }
}
