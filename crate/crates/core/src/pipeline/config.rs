use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lstm::{Architecture, TrainConfig};
use crate::metrics::EvalConfig;
use crate::svr::SvrHyper;

/// Everything a full training or cross-validation run needs.
///
/// `rng_seed` is the single root: stage and trial seeds are derived from it
/// (`lstm_train`, `cv_trial`/k, `svr_importance`, ...), and the
/// `train.rng_seed` passed down to the optimizer is overwritten with the
/// derived value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub window_len: usize,
    pub num_segments: usize,
    /// By-child split fractions; must sum to 1.
    pub train_frac: f64,
    pub val_frac: f64,
    pub test_frac: f64,
    pub trials: usize,
    pub layer_sizes: Vec<usize>,
    pub dropout_rate: f64,
    /// Per-variable hidden segment size of the attention network.
    pub imv_seg_size: usize,
    /// Tune SVR `C`/`epsilon` on the validation children by grid search.
    pub svr_grid_search: bool,
    pub eval: EvalConfig,
    pub train: TrainConfig,
    pub svr: SvrHyper,
    pub rng_seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            window_len: 120,
            num_segments: 20,
            train_frac: 0.8,
            val_frac: 0.1,
            test_frac: 0.1,
            trials: 10,
            layer_sizes: vec![70, 50],
            dropout_rate: 0.2,
            imv_seg_size: 8,
            svr_grid_search: true,
            eval: EvalConfig::default(),
            train: TrainConfig::default(),
            svr: SvrHyper::default(),
            rng_seed: 42,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, f) in [
            ("train_frac", self.train_frac),
            ("val_frac", self.val_frac),
            ("test_frac", self.test_frac),
        ] {
            if !(f > 0.0) {
                return Err(Error::invalid_config(name, "must be > 0"));
            }
        }
        let sum = self.train_frac + self.val_frac + self.test_frac;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid_config(
                "train_frac/val_frac/test_frac",
                format!("must sum to 1, got {sum}"),
            ));
        }
        if self.trials == 0 {
            return Err(Error::invalid_config("trials", "must be >= 1"));
        }
        if self.window_len == 0 {
            return Err(Error::invalid_config("window_len", "must be >= 1"));
        }
        if self.num_segments == 0 {
            return Err(Error::invalid_config("num_segments", "must be >= 1"));
        }
        if self.imv_seg_size == 0 {
            return Err(Error::invalid_config("imv_seg_size", "must be >= 1"));
        }
        self.architecture().validate()?;
        self.eval.validate()?;
        self.train.validate()?;
        self.svr.validate()?;
        Ok(())
    }

    pub fn architecture(&self) -> Architecture {
        Architecture {
            layer_sizes: self.layer_sizes.clone(),
            dropout_rate: self.dropout_rate,
        }
    }
}
