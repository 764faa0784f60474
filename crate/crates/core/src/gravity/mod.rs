//! Regularized SGD matrix factorization with embedded bias factors,
//! early-stopped training, factor-space similarity export, and model
//! persistence.
//!
//! Ratings are factorized in a [0, 1]-normalized space. With the bias
//! convention on, slot 0 of every user vector and slot 1 of every item
//! vector are pinned to 1 and never updated, so their opposite-side
//! partners act as item and user biases: r̂ = q₀ + p₁ + Σ_{k≥2} p_k·q_k.

mod factor_sim;
mod io;
mod train;

pub use factor_sim::{factor_similarity_matrix, FactorMeasure};
pub use train::train;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::IdMap;
use crate::predict::{default_predict, DefaultMode, Origin, Prediction, Scorer};
use crate::profile::UserProfile;
use crate::ratings::{split::mix64, RatingScale, RatingsMatrix};

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GravityParams {
    /// Total factor slots per vector, bias slots included.
    pub factors: usize,
    pub learning_rate: f64,
    pub regularization: f64,
    pub max_epochs: usize,
    /// Successive validation-RMSE increases tolerated before stopping.
    pub patience: usize,
    /// Optional wall-clock training budget in seconds.
    pub time_cap: Option<f64>,
    /// Fraction of the training logs held out to steer early stopping.
    pub validation_fraction: f64,
    /// Hard bound: every factor is projected into [−clamp, clamp].
    pub clamp: f64,
    /// Free factors initialize uniformly in ±init_range.
    pub init_range: f64,
    pub use_bias: bool,
    pub seed: u64,
}

impl Default for GravityParams {
    fn default() -> GravityParams {
        GravityParams {
            factors: 16,
            learning_rate: 0.030,
            regularization: 0.008,
            max_epochs: 500,
            patience: 3,
            time_cap: None,
            validation_fraction: 0.005,
            clamp: 1.0,
            init_range: 0.01,
            use_bias: true,
            seed: 0,
        }
    }
}

impl GravityParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParam(msg));
        if self.factors == 0 {
            return bad("factor count must be ≥ 1".into());
        }
        if self.use_bias && self.factors < 3 {
            return bad(format!(
                "the bias convention pins two factor slots, so factors must be ≥ 3 (got {})",
                self.factors
            ));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad(format!("learning rate must be positive, got {}", self.learning_rate));
        }
        if !(self.regularization.is_finite() && self.regularization >= 0.0) {
            return bad(format!(
                "regularization must be non-negative, got {}",
                self.regularization
            ));
        }
        if self.max_epochs == 0 {
            return bad("max epochs must be ≥ 1".into());
        }
        if self.patience == 0 {
            return bad("patience must be ≥ 1".into());
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 0.5) {
            return bad(format!(
                "validation fraction must lie in (0, 0.5), got {}",
                self.validation_fraction
            ));
        }
        if !(self.clamp.is_finite() && self.clamp > 0.0) {
            return bad(format!("factor clamp bound must be positive, got {}", self.clamp));
        }
        if !(self.init_range.is_finite() && self.init_range >= 0.0) {
            return bad(format!("init range must be non-negative, got {}", self.init_range));
        }
        Ok(())
    }
}

/// One epoch of the training curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// RMSE over the visited training logs (pre-update errors), in
    /// original rating units.
    pub train_rmse: f64,
    /// RMSE on the held-out validation logs; absent when the hold-out
    /// rounded down to zero logs.
    pub val_rmse: Option<f64>,
}

/// A trained (or freshly initialized) factor model.
#[derive(Debug, Clone)]
pub struct FactorModel {
    users: Arc<IdMap>,
    items: Arc<IdMap>,
    k: usize,
    use_bias: bool,
    /// Row-major user factors: `p[u * k + slot]`.
    p: Vec<f64>,
    /// Row-major item factors: `q[i * k + slot]`.
    q: Vec<f64>,
    scale: RatingScale,
    /// Users/items with at least one training log. Prediction refuses the
    /// rest — their vectors are untrained noise.
    seen_user: Vec<bool>,
    seen_item: Vec<bool>,
    curve: Vec<EpochStats>,
    params: GravityParams,
    source_fingerprint: String,
}

const INIT_SALT: u64 = 0xC2B2_AE3D_27D4_EB4F;

impl FactorModel {
    /// A fresh model: fixed bias slots at 1, free slots uniform in
    /// ±init_range (reproducible from the seed). Every user and item
    /// counts as seen; [`train`] narrows that to what its logs touch.
    pub fn init(
        users: Arc<IdMap>,
        items: Arc<IdMap>,
        scale: RatingScale,
        params: &GravityParams,
    ) -> Result<FactorModel> {
        params.validate()?;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(mix64(params.seed ^ INIT_SALT));
        let k = params.factors;
        let mut draw = |fixed_slot: Option<usize>, rows: usize| -> Vec<f64> {
            let mut table = Vec::with_capacity(rows * k);
            for _ in 0..rows {
                for slot in 0..k {
                    if fixed_slot == Some(slot) {
                        table.push(1.0);
                    } else if params.init_range > 0.0 {
                        table.push((rng.gen::<f64>() * 2.0 - 1.0) * params.init_range);
                    } else {
                        table.push(0.0);
                    }
                }
            }
            table
        };
        let p = draw(params.use_bias.then_some(0), users.len());
        let q = draw(params.use_bias.then_some(1), items.len());
        Ok(FactorModel {
            seen_user: vec![true; users.len()],
            seen_item: vec![true; items.len()],
            users,
            items,
            k,
            use_bias: params.use_bias,
            p,
            q,
            scale,
            curve: Vec::new(),
            params: params.clone(),
            source_fingerprint: String::new(),
        })
    }

    /// Assembles a model from explicit factor tables (model surgery,
    /// persistence, tests). Everything counts as seen.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        users: Arc<IdMap>,
        items: Arc<IdMap>,
        scale: RatingScale,
        params: GravityParams,
        p: Vec<f64>,
        q: Vec<f64>,
    ) -> Result<FactorModel> {
        params.validate()?;
        let k = params.factors;
        if p.len() != users.len() * k || q.len() != items.len() * k {
            return Err(Error::InvalidParam(format!(
                "factor table sizes ({}, {}) do not match {} users × {} items × {} factors",
                p.len(),
                q.len(),
                users.len(),
                items.len(),
                k
            )));
        }
        Ok(FactorModel {
            seen_user: vec![true; users.len()],
            seen_item: vec![true; items.len()],
            users,
            items,
            k,
            use_bias: params.use_bias,
            p,
            q,
            scale,
            curve: Vec::new(),
            params,
            source_fingerprint: String::new(),
        })
    }

    pub fn users(&self) -> &Arc<IdMap> {
        &self.users
    }

    pub fn items(&self) -> &Arc<IdMap> {
        &self.items
    }

    /// Factor slots per vector (bias slots included).
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn use_bias(&self) -> bool {
        self.use_bias
    }

    pub fn scale(&self) -> RatingScale {
        self.scale
    }

    pub fn params(&self) -> &GravityParams {
        &self.params
    }

    pub fn curve(&self) -> &[EpochStats] {
        &self.curve
    }

    pub fn source_fingerprint(&self) -> &str {
        &self.source_fingerprint
    }

    pub fn user_factors(&self, u: u32) -> &[f64] {
        let s = u as usize * self.k;
        &self.p[s..s + self.k]
    }

    pub fn item_factors(&self, i: u32) -> &[f64] {
        let s = i as usize * self.k;
        &self.q[s..s + self.k]
    }

    pub fn user_seen(&self, u: u32) -> bool {
        self.seen_user.get(u as usize).copied().unwrap_or(false)
    }

    pub fn item_seen(&self, i: u32) -> bool {
        self.seen_item.get(i as usize).copied().unwrap_or(false)
    }

    /// Raw factor product in normalized rating space (no clamping).
    pub fn predict_normalized(&self, u: u32, i: u32) -> f64 {
        let pu = self.user_factors(u);
        let qi = self.item_factors(i);
        pu.iter().zip(qi).map(|(a, b)| a * b).sum()
    }

    /// Predicted rating on the original scale, clamped. Unknown or unseen
    /// users/items are errors — callers route those to a fallback.
    pub fn predict(&self, u: u32, i: u32) -> Result<f64> {
        if !self.user_seen(u) {
            return Err(Error::UnknownUser(
                self.users
                    .names()
                    .nth(u as usize)
                    .map_or_else(|| format!("#{u}"), str::to_string),
            ));
        }
        if !self.item_seen(i) {
            return Err(Error::UnknownItem(
                self.items
                    .names()
                    .nth(i as usize)
                    .map_or_else(|| format!("#{i}"), str::to_string),
            ));
        }
        let raw = self.predict_normalized(u, i);
        Ok(self.scale.clamp(self.scale.denormalize(raw)))
    }

    /// One SGD update for a single log. `r_norm` must already be
    /// normalized into [0, 1]. The error is computed before any update,
    /// the item update uses the user's pre-update factors, the fixed bias
    /// slots stay untouched, and every updated slot is projected back into
    /// [−clamp, clamp]. Returns the pre-update error.
    pub fn sgd_step(&mut self, u: u32, i: u32, r_norm: f64, alpha: f64, lambda: f64) -> f64 {
        let e = r_norm - self.predict_normalized(u, i);
        self.step_with_error(u, i, e, alpha, lambda);
        e
    }

    pub(crate) fn step_with_error(&mut self, u: u32, i: u32, e: f64, alpha: f64, lambda: f64) {
        let clamp = self.params.clamp;
        let pu = u as usize * self.k;
        let qi = i as usize * self.k;
        for slot in 0..self.k {
            let p_old = self.p[pu + slot];
            let q_old = self.q[qi + slot];
            if !(self.use_bias && slot == 0) {
                self.p[pu + slot] = (p_old + alpha * (e * q_old - lambda * p_old)).clamp(-clamp, clamp);
            }
            if !(self.use_bias && slot == 1) {
                self.q[qi + slot] = (q_old + alpha * (e * p_old - lambda * q_old)).clamp(-clamp, clamp);
            }
        }
    }

    #[cfg(test)]
    pub(crate) fn factor_tables(&self) -> (&[f64], &[f64]) {
        (&self.p, &self.q)
    }

    pub(crate) fn snapshot_factors(&self) -> (Vec<f64>, Vec<f64>) {
        (self.p.clone(), self.q.clone())
    }

    pub(crate) fn restore_factors(&mut self, snapshot: (Vec<f64>, Vec<f64>)) {
        self.p = snapshot.0;
        self.q = snapshot.1;
    }

    pub(crate) fn set_seen(&mut self, seen_user: Vec<bool>, seen_item: Vec<bool>) {
        self.seen_user = seen_user;
        self.seen_item = seen_item;
    }

    pub(crate) fn set_curve(&mut self, curve: Vec<EpochStats>) {
        self.curve = curve;
    }

    pub(crate) fn set_source_fingerprint(&mut self, fp: String) {
        self.source_fingerprint = fp;
    }
}

/// Scores (profile, item) pairs with a factor model, cascading to the
/// model-free fallback for users or items the model never saw. The model
/// may come from a different session: ids are translated by name when the
/// universes differ.
pub struct GravityScorer<'a> {
    model: &'a FactorModel,
    train: &'a RatingsMatrix,
    /// train user id → model user id; `None` when the universes already agree.
    user_map: Option<Vec<Option<u32>>>,
    item_map: Option<Vec<Option<u32>>>,
}

impl<'a> GravityScorer<'a> {
    pub fn new(model: &'a FactorModel, train: &'a RatingsMatrix) -> GravityScorer<'a> {
        let user_map = (!crate::ids::same_universe(model.users(), train.users())).then(|| {
            train.users().names().map(|n| model.users().get(n)).collect()
        });
        let item_map = (!crate::ids::same_universe(model.items(), train.items())).then(|| {
            train.items().names().map(|n| model.items().get(n)).collect()
        });
        GravityScorer {
            model,
            train,
            user_map,
            item_map,
        }
    }

    fn model_user(&self, u: u32) -> Option<u32> {
        match &self.user_map {
            None => Some(u),
            Some(map) => map.get(u as usize).copied().flatten(),
        }
    }

    fn model_item(&self, i: u32) -> Option<u32> {
        match &self.item_map {
            None => Some(i),
            Some(map) => map.get(i as usize).copied().flatten(),
        }
    }
}

impl Scorer for GravityScorer<'_> {
    fn predict(&self, profile: &UserProfile, item: u32) -> Prediction {
        let value = profile
            .user()
            .and_then(|u| self.model_user(u))
            .zip(self.model_item(item))
            .and_then(|(mu, mi)| self.model.predict(mu, mi).ok());
        match value {
            Some(v) => Prediction {
                value: v,
                origin: Origin::MainModel,
                confidence: None,
                explanation: None,
            },
            None => default_predict(profile, item, self.train, DefaultMode::Collaborative),
        }
    }

    fn label(&self) -> String {
        format!("gravity-f{}", self.model.k())
    }
}
