//! Training: same optimizer and schedule contract as the LSTM regressor.

use super::backward::window_grad;
use super::forward::forward_cached;
use super::model::{ImvModel, ImvParams};
use crate::data::LabeledWindow;
use crate::error::Result;
use crate::lstm::TrainConfig;
use crate::seeds;

impl crate::lstm::train_support::SequenceRegressor for ImvModel {
    type Params = ImvParams;

    fn params(&self) -> &ImvParams {
        &self.params
    }

    fn params_mut(&mut self) -> &mut ImvParams {
        &mut self.params
    }

    fn window_grad(
        &self,
        w: &LabeledWindow,
        inv_batch: f64,
        _mask_seed: u64,
    ) -> Result<(f64, ImvParams)> {
        window_grad(self, w, inv_batch)
    }

    fn predict(&self, w: &LabeledWindow) -> Result<f64> {
        Ok(forward_cached(self, w)?.prediction)
    }
}

/// Trains the variable-wise attention network on normalized windows,
/// minimizing the MSE of the mixture prediction. Returns the
/// best-validation-epoch model.
pub fn train_imv(
    train_windows: &[LabeledWindow],
    val_windows: &[LabeledWindow],
    cfg: &TrainConfig,
    seg_size: usize,
) -> Result<ImvModel> {
    let mut init_rng = seeds::rng(cfg.rng_seed, "imv_init");
    let model = ImvModel::init(seg_size, &mut init_rng)?;
    let (best, _history) =
        crate::lstm::train_support::fit_regressor(model, train_windows, val_windows, cfg, "imv")?;
    Ok(best)
}
