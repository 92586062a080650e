//! Variable-wise LSTM with mixture attention.
//!
//! The hidden state is partitioned into one segment per input channel, each
//! updated only from its own channel and its own segment (block-diagonal
//! recurrence). A temporal softmax per channel turns the segment trajectory
//! into a context vector, a per-channel head predicts from
//! `[context; final hidden]`, and a softmax mixture over channels combines
//! the per-channel predictions. The mixture probabilities are the overall
//! channel importances; the temporal weights are the per-timestep ones.

mod backward;
mod forward;
mod model;
mod report;
mod train;

pub use forward::{imv_forward, ImvAttention};
pub use model::{ImvModel, ImvParams, VarBlock};
pub use report::{importance_report, overall_csv, per_timestep_csv, ImportanceReport};
pub use train::train_imv;
