//! SGD training with a held-out validation slice and patience-based
//! early stopping.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{EpochStats, FactorModel, GravityParams};
use crate::error::{Error, Result};
use crate::ratings::{split::mix64, RatingsMatrix};

const TRAIN_SALT: u64 = 0x165_667B1_9E37_79F9;

/// Tracks a validation curve: remembers the best value seen and counts
/// successive increases, calling the stop once the streak reaches the
/// patience budget.
#[derive(Debug)]
pub(crate) struct EarlyStopper {
    patience: usize,
    epoch: usize,
    prev: Option<f64>,
    best: f64,
    best_epoch: usize,
    streak: usize,
}

/// What [`EarlyStopper::observe`] concluded about the newest epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Verdict {
    /// Strictly better than everything seen before — snapshot the model.
    pub improved: bool,
    /// The increase streak exhausted the patience — stop training.
    pub stop: bool,
}

impl EarlyStopper {
    pub fn new(patience: usize) -> EarlyStopper {
        EarlyStopper {
            patience,
            epoch: 0,
            prev: None,
            best: f64::INFINITY,
            best_epoch: 0,
            streak: 0,
        }
    }

    pub fn observe(&mut self, value: f64) -> Verdict {
        self.epoch += 1;
        let improved = value < self.best;
        if improved {
            self.best = value;
            self.best_epoch = self.epoch;
        }
        match self.prev {
            Some(prev) if value > prev => self.streak += 1,
            _ => self.streak = 0,
        }
        self.prev = Some(value);
        Verdict {
            improved,
            stop: self.streak >= self.patience,
        }
    }

    pub fn best_epoch(&self) -> usize {
        self.best_epoch
    }
}

/// Trains a factor model on `m`.
///
/// A seed-shuffled slice of `validation_fraction` of the logs is held out
/// and never trained on; after each epoch its RMSE decides improvement and
/// stopping (epochs whose hold-out rounded down to zero logs fall back to
/// the epoch's own training RMSE). The returned model carries the factor
/// snapshot from the best validation epoch, the full epoch curve, and the
/// fingerprint of the ratings it was trained on.
pub fn train(m: &RatingsMatrix, params: &GravityParams) -> Result<FactorModel> {
    params.validate()?;
    if m.is_empty() {
        return Err(Error::Empty("cannot train a factor model on an empty rating set"));
    }
    let started = std::time::Instant::now();
    let scale = m.scale();
    let width = scale.width();

    let mut model = FactorModel::init(m.users().clone(), m.items().clone(), scale, params)?;
    let mut seen_user = vec![false; m.n_users()];
    let mut seen_item = vec![false; m.n_items()];
    let mut logs: Vec<(u32, u32, f64)> = Vec::with_capacity(m.len());
    for (u, i, r) in m.iter() {
        seen_user[u as usize] = true;
        seen_item[i as usize] = true;
        logs.push((u, i, scale.normalize(r)));
    }
    model.set_seen(seen_user, seen_item);
    model.set_source_fingerprint(m.fingerprint());

    let mut rng = ChaCha8Rng::seed_from_u64(mix64(params.seed ^ TRAIN_SALT));
    logs.shuffle(&mut rng);
    let n_val = ((logs.len() as f64 * params.validation_fraction).round() as usize)
        .min(logs.len() - 1);
    let validation = logs[..n_val].to_vec();
    let mut sweep = logs[n_val..].to_vec();

    let (alpha, lambda) = (params.learning_rate, params.regularization);
    let mut stopper = EarlyStopper::new(params.patience);
    let mut curve: Vec<EpochStats> = Vec::new();
    let mut best = model.snapshot_factors();

    for epoch in 1..=params.max_epochs {
        sweep.shuffle(&mut rng);
        // Kahan-compensated sum of squared pre-update errors.
        let (mut acc, mut comp) = (0.0f64, 0.0f64);
        for &(u, i, r_norm) in &sweep {
            let e = model.sgd_step(u, i, r_norm, alpha, lambda);
            let term = e * e - comp;
            let next = acc + term;
            comp = (next - acc) - term;
            acc = next;
        }
        let train_rmse = width * (acc / sweep.len() as f64).sqrt();
        let val_rmse = (!validation.is_empty()).then(|| {
            let sq: f64 = validation
                .iter()
                .map(|&(u, i, r_norm)| {
                    let predicted = scale.clamp(scale.denormalize(model.predict_normalized(u, i)));
                    let truth = scale.denormalize(r_norm);
                    (predicted - truth) * (predicted - truth)
                })
                .sum();
            (sq / validation.len() as f64).sqrt()
        });
        curve.push(EpochStats {
            epoch,
            train_rmse,
            val_rmse,
        });
        let verdict = stopper.observe(val_rmse.unwrap_or(train_rmse));
        if verdict.improved {
            best = model.snapshot_factors();
        }
        if verdict.stop {
            log::info!(
                "gravity training stopped at epoch {epoch}: validation rose {} epochs in a row (best epoch {})",
                params.patience,
                stopper.best_epoch()
            );
            break;
        }
        if let Some(cap) = params.time_cap {
            if started.elapsed().as_secs_f64() >= cap {
                log::info!("gravity training hit the {cap}s wall-clock cap at epoch {epoch}");
                break;
            }
        }
    }

    model.restore_factors(best);
    model.set_curve(curve);
    Ok(model)
}
