//! Mini-batch training loop.
//!
//! Each epoch draws a fresh shuffle of the training windows and runs
//! `iterations_per_epoch` mini-batches of size `ceil(N / iterations_per_epoch)`,
//! so one epoch is approximately one pass over the data. The history records
//! the mean train-mode loss of each epoch's batches and the infer-mode
//! validation MSE; the returned model is the epoch snapshot with the best
//! validation MSE.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, clip_global_norm, AdamState, ParamBuffers};
use super::forward::{forward_cached, Mode};
use super::model::{Architecture, LstmCoreParams, LstmModel};
use crate::data::LabeledWindow;
use crate::error::{Error, Result};
use crate::seeds;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub iterations_per_epoch: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_epsilon: f64,
    pub rng_seed: u64,
    /// Global-norm clip applied to the batch gradients before each step.
    pub gradient_clip_norm: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.005,
            epochs: 250,
            iterations_per_epoch: 10,
            beta1: 0.9,
            beta2: 0.999,
            adam_epsilon: 1e-8,
            rng_seed: 42,
            gradient_clip_norm: Some(5.0),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::invalid_config("learning_rate", "must be > 0"));
        }
        if self.epochs == 0 {
            return Err(Error::invalid_config("epochs", "must be >= 1"));
        }
        if self.iterations_per_epoch == 0 {
            return Err(Error::invalid_config("iterations_per_epoch", "must be >= 1"));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&b) {
                return Err(Error::invalid_config(name, "must be in [0, 1)"));
            }
        }
        if !(self.adam_epsilon > 0.0) {
            return Err(Error::invalid_config("adam_epsilon", "must be > 0"));
        }
        if let Some(c) = self.gradient_clip_norm {
            if !(c > 0.0) {
                return Err(Error::invalid_config("gradient_clip_norm", "must be > 0"));
            }
        }
        Ok(())
    }
}

/// Per-epoch train/validation losses and the selected epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingHistory {
    pub train_mse: Vec<f64>,
    pub val_mse: Vec<f64>,
    pub best_epoch: usize,
}

/// Mean of squared differences.
pub fn mse_loss(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::EmptyInput("mse over no pairs".into()));
    }
    if predictions.len() != targets.len() {
        return Err(Error::shape("mse lengths", predictions.len(), targets.len()));
    }
    let n = predictions.len() as f64;
    Ok(predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t) * (p - t))
        .sum::<f64>()
        / n)
}

/// A model the generic mini-batch driver can fit: anything that can score a
/// window and return the gradient of its squared error.
pub(crate) trait SequenceRegressor: Clone + Send + Sync {
    type Params: ParamBuffers + Clone + Send + Sync;

    fn params(&self) -> &Self::Params;
    fn params_mut(&mut self) -> &mut Self::Params;
    /// `(squared error, gradients of dpred * prediction)` for one window, in
    /// train mode, with `dpred = 2 * (prediction - label) * inv_batch`.
    fn window_grad(&self, w: &LabeledWindow, inv_batch: f64, mask_seed: u64)
        -> Result<(f64, Self::Params)>;
    /// Deterministic inference.
    fn predict(&self, w: &LabeledWindow) -> Result<f64>;
}

impl SequenceRegressor for LstmModel {
    type Params = LstmCoreParams;

    fn params(&self) -> &LstmCoreParams {
        &self.params
    }

    fn params_mut(&mut self) -> &mut LstmCoreParams {
        &mut self.params
    }

    fn window_grad(
        &self,
        w: &LabeledWindow,
        inv_batch: f64,
        mask_seed: u64,
    ) -> Result<(f64, LstmCoreParams)> {
        let (loss, grads) = window_grad_lstm(self, w, inv_batch, mask_seed)?;
        Ok((loss, grads))
    }

    fn predict(&self, w: &LabeledWindow) -> Result<f64> {
        let mut rng = seeds::rng(0, "unused-in-infer");
        Ok(forward_cached(self, w, Mode::Infer, &mut rng)?.prediction)
    }
}

fn window_grad_lstm(
    model: &LstmModel,
    w: &LabeledWindow,
    inv_batch: f64,
    mask_seed: u64,
) -> Result<(f64, LstmCoreParams)> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(mask_seed);
    let cache = forward_cached(model, w, Mode::Train, &mut rng)?;
    let err = cache.prediction - w.sems_label;
    let grads = super::backward::backward_window(model, w, &cache, 2.0 * err * inv_batch);
    Ok((err * err, grads))
}

/// The shared mini-batch Adam driver. `label` keys this model's seed streams.
pub(crate) fn fit_regressor<M: SequenceRegressor>(
    mut model: M,
    train_windows: &[LabeledWindow],
    val_windows: &[LabeledWindow],
    cfg: &TrainConfig,
    label: &str,
) -> Result<(M, TrainingHistory)> {
    cfg.validate()?;
    if train_windows.is_empty() {
        return Err(Error::EmptyInput("training set is empty".into()));
    }
    let n = train_windows.len();
    let batch_size = n.div_ceil(cfg.iterations_per_epoch);
    let mut shuffle_rng = seeds::rng(cfg.rng_seed, &format!("{label}_shuffle"));
    let mut state = AdamState::new(model.params());

    let mut history = TrainingHistory {
        train_mse: Vec::with_capacity(cfg.epochs),
        val_mse: Vec::with_capacity(cfg.epochs),
        best_epoch: 0,
    };
    let mut best = f64::INFINITY;
    let mut best_model = model.clone();

    let mut order: Vec<usize> = (0..n).collect();
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        let mut batches = 0usize;
        for (iter, chunk) in order.chunks(batch_size).enumerate() {
            let inv_b = 1.0 / chunk.len() as f64;
            let jobs: Vec<(usize, u64)> = chunk
                .iter()
                .enumerate()
                .map(|(slot, &wi)| {
                    let idx = ((epoch as u64) << 40) | ((iter as u64) << 20) | slot as u64;
                    (wi, seeds::derive_indexed(cfg.rng_seed, &format!("{label}_mask"), idx))
                })
                .collect();

            let one = |(wi, seed): &(usize, u64)| model.window_grad(&train_windows[*wi], inv_b, *seed);
            #[cfg(feature = "parallel")]
            let results: Vec<Result<(f64, M::Params)>> = {
                use rayon::prelude::*;
                jobs.par_iter().map(one).collect()
            };
            #[cfg(not(feature = "parallel"))]
            let results: Vec<Result<(f64, M::Params)>> = jobs.iter().map(one).collect();

            let mut loss = 0.0;
            let mut grads: Option<M::Params> = None;
            for r in results {
                let (sq, g) = r?;
                loss += sq * inv_b;
                match grads.as_mut() {
                    Some(acc) => super::adam::add_assign(acc, &g),
                    None => grads = Some(g),
                }
            }
            let mut grads = grads.expect("non-empty chunk");
            if let Some(max_norm) = cfg.gradient_clip_norm {
                clip_global_norm(&mut grads, max_norm);
            }
            adam_step(model.params_mut(), &grads, &mut state, cfg)?;
            epoch_loss += loss;
            batches += 1;
        }
        history.train_mse.push(epoch_loss / batches as f64);

        let val = if val_windows.is_empty() {
            *history.train_mse.last().unwrap()
        } else {
            let preds: Vec<f64> = val_windows
                .iter()
                .map(|w| model.predict(w))
                .collect::<Result<_>>()?;
            let targets: Vec<f64> = val_windows.iter().map(|w| w.sems_label).collect();
            mse_loss(&preds, &targets)?
        };
        history.val_mse.push(val);
        if val < best {
            best = val;
            best_model = model.clone();
            history.best_epoch = epoch;
        }
    }
    Ok((best_model, history))
}

/// Trains an LSTM from scratch on normalized windows and returns the
/// best-validation-epoch model with its history.
pub fn train(
    train_windows: &[LabeledWindow],
    val_windows: &[LabeledWindow],
    cfg: &TrainConfig,
    arch: &Architecture,
) -> Result<(LstmModel, TrainingHistory)> {
    let input_size = crate::data::NUM_CHANNELS;
    let mut init_rng = seeds::rng(cfg.rng_seed, "lstm_init");
    let model = LstmModel::init(input_size, arch, &mut init_rng)?;
    fit_regressor(model, train_windows, val_windows, cfg, "lstm")
}
