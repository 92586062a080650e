//! From-scratch LSTM regressor: stacked LSTM layers with inverted dropout
//! between them and after the last one, a one-neuron dense head, mean squared
//! error loss, backpropagation through time, and Adam.

mod adam;
mod backward;
mod forward;
mod model;
mod train;

pub use adam::{adam_step, clip_global_norm, AdamState, ParamBuffers};
pub use backward::batch_gradients;
pub use forward::{forward_sequence, ActivationTrace, LayerTrace, Mode};
pub use model::{Architecture, Gate, LstmCoreParams, LstmLayerParams, LstmModel, GATE_COUNT};
pub use train::{mse_loss, train, TrainConfig, TrainingHistory};

/// Shared mini-batch driver, reused by the attention network.
pub(crate) mod train_support {
    pub(crate) use super::train::{fit_regressor, SequenceRegressor};
}

#[cfg(test)]
mod tests;
