//! Sequence forward pass.
//!
//! Layer 1 consumes the input window; each layer's output stream passes
//! through an inverted-dropout site before feeding the next layer, and the
//! last layer's output passes through one more site before the dense head.
//! The prediction is the dense head applied to the final timestep's (dropped)
//! hidden state. Inference applies no dropout and is deterministic.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::model::{activate_gates, Gate, LstmModel, GATE_COUNT};
use crate::data::LabeledWindow;
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Infer,
}

/// Per-layer hidden and cell state sequences plus the final prediction.
#[derive(Debug, Clone)]
pub struct ActivationTrace {
    pub layers: Vec<LayerTrace>,
    pub prediction: f64,
}

#[derive(Debug, Clone)]
pub struct LayerTrace {
    /// n x hidden_size.
    pub hidden: Matrix,
    /// n x hidden_size.
    pub cell: Matrix,
}

/// Everything the backward pass needs from one layer's forward sweep.
pub(super) struct LayerCache {
    /// Post-activation gate values, each n x hidden.
    pub gates: [Matrix; GATE_COUNT],
    pub c: Matrix,
    pub h: Matrix,
    /// Inverted-dropout multipliers (0 or 1/keep), n x hidden.
    pub mask: Matrix,
    /// h element-wise scaled by mask; the stream the next stage consumes.
    pub dropped: Matrix,
}

pub(super) struct ForwardCache {
    pub layers: Vec<LayerCache>,
    pub prediction: f64,
}

impl ForwardCache {
    pub fn trace(&self) -> ActivationTrace {
        ActivationTrace {
            layers: self
                .layers
                .iter()
                .map(|l| LayerTrace {
                    hidden: l.h.clone(),
                    cell: l.c.clone(),
                })
                .collect(),
            prediction: self.prediction,
        }
    }
}

fn check_window(model: &LstmModel, window: &LabeledWindow) -> Result<()> {
    if window.values.cols != model.input_size {
        return Err(Error::shape("window channels", model.input_size, window.values.cols));
    }
    if window.values.rows == 0 {
        return Err(Error::EmptyInput("window has no timesteps".into()));
    }
    Ok(())
}

/// Runs the full forward pass. In train mode dropout masks are drawn from
/// `rng` (one Bernoulli per unit per timestep per layer, in layer-major,
/// time-major order); in infer mode `rng` is untouched.
pub fn forward_sequence(
    model: &LstmModel,
    window: &LabeledWindow,
    mode: Mode,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, ActivationTrace)> {
    let cache = forward_cached(model, window, mode, rng)?;
    Ok((cache.prediction, cache.trace()))
}

pub(super) fn forward_cached(
    model: &LstmModel,
    window: &LabeledWindow,
    mode: Mode,
    rng: &mut ChaCha8Rng,
) -> Result<ForwardCache> {
    check_window(model, window)?;
    let n = window.values.rows;
    let p = model.dropout_rate;
    let keep = 1.0 - p;
    let drop_active = mode == Mode::Train && p > 0.0;

    let mut layers = Vec::with_capacity(model.params.layers.len());
    for (l, layer) in model.params.layers.iter().enumerate() {
        let hidden = layer.hidden_size();
        let mut cache = LayerCache {
            gates: std::array::from_fn(|_| Matrix::zeros(n, hidden)),
            c: Matrix::zeros(n, hidden),
            h: Matrix::zeros(n, hidden),
            mask: Matrix::zeros(n, hidden),
            dropped: Matrix::zeros(n, hidden),
        };
        let mut h_prev = vec![0.0; hidden];
        let mut c_prev = vec![0.0; hidden];
        let mut gates: [Vec<f64>; GATE_COUNT] = std::array::from_fn(|_| vec![0.0; hidden]);
        for t in 0..n {
            {
                let x_t: &[f64] = if l == 0 {
                    window.values.row(t)
                } else {
                    let below: &LayerCache = &layers[l - 1];
                    below.dropped.row(t)
                };
                layer.gate_preactivations(x_t, &h_prev, &mut gates);
            }
            activate_gates(&mut gates);
            for k in 0..hidden {
                let c = gates[Gate::Forget as usize][k] * c_prev[k]
                    + gates[Gate::Input as usize][k] * gates[Gate::Cell as usize][k];
                let h = gates[Gate::Output as usize][k] * c.tanh();
                cache.c.set(t, k, c);
                cache.h.set(t, k, h);
                c_prev[k] = c;
                h_prev[k] = h;
            }
            for g in 0..GATE_COUNT {
                cache.gates[g].row_mut(t).copy_from_slice(&gates[g]);
            }
            for k in 0..hidden {
                let m = if drop_active {
                    if rng.gen_bool(keep) {
                        1.0 / keep
                    } else {
                        0.0
                    }
                } else {
                    1.0
                };
                cache.mask.set(t, k, m);
                cache.dropped.set(t, k, m * cache.h.get(t, k));
            }
        }
        layers.push(cache);
    }
    let last = layers.last().expect("validated model has layers");
    let prediction = dot(&model.params.dense_w, last.dropped.row(n - 1)) + model.params.dense_b;
    Ok(ForwardCache { layers, prediction })
}
