//! LSTM parameters, initialization, and serialization.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::ParamBuffers;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const GATE_COUNT: usize = 4;

/// Gate order used for the `[_; 4]` parameter arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Input = 0,
    Forget = 1,
    Output = 2,
    /// The tanh cell-candidate gate.
    Cell = 3,
}

/// One LSTM layer: per-gate input weights `w` (hidden x input), recurrent
/// weights `u` (hidden x hidden), and biases `b` (hidden).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmLayerParams {
    pub w: [Matrix; GATE_COUNT],
    pub u: [Matrix; GATE_COUNT],
    pub b: [Vec<f64>; GATE_COUNT],
}

impl LstmLayerParams {
    pub fn hidden_size(&self) -> usize {
        self.w[0].rows
    }

    pub fn input_size(&self) -> usize {
        self.w[0].cols
    }

    fn zeros(input: usize, hidden: usize) -> Self {
        LstmLayerParams {
            w: std::array::from_fn(|_| Matrix::zeros(hidden, input)),
            u: std::array::from_fn(|_| Matrix::zeros(hidden, hidden)),
            b: std::array::from_fn(|_| vec![0.0; hidden]),
        }
    }

    fn check(&self) -> Result<()> {
        let (hidden, input) = (self.hidden_size(), self.input_size());
        for g in 0..GATE_COUNT {
            if self.w[g].rows != hidden
                || self.w[g].cols != input
                || self.u[g].rows != hidden
                || self.u[g].cols != hidden
                || self.b[g].len() != hidden
                || !self.w[g].is_consistent()
                || !self.u[g].is_consistent()
            {
                return Err(Error::shape(
                    format!("lstm layer gate {g}"),
                    format!("{hidden}x{input}"),
                    format!("{}x{}", self.w[g].rows, self.w[g].cols),
                ));
            }
        }
        Ok(())
    }

    /// One cell step: the standard LSTM equations
    /// `i,f,o = sigmoid(Wx + Uh + b)`, `g = tanh(Wx + Uh + b)`,
    /// `c' = f.c + i.g`, `h' = o.tanh(c')`.
    pub fn cell_forward(
        &self,
        x: &[f64],
        h_prev: &[f64],
        c_prev: &[f64],
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let hidden = self.hidden_size();
        if x.len() != self.input_size() {
            return Err(Error::shape("cell input", self.input_size(), x.len()));
        }
        if h_prev.len() != hidden || c_prev.len() != hidden {
            return Err(Error::shape(
                "cell state",
                hidden,
                format!("h={}, c={}", h_prev.len(), c_prev.len()),
            ));
        }
        let mut gates = [
            vec![0.0; hidden],
            vec![0.0; hidden],
            vec![0.0; hidden],
            vec![0.0; hidden],
        ];
        self.gate_preactivations(x, h_prev, &mut gates);
        let mut h = vec![0.0; hidden];
        let mut c = vec![0.0; hidden];
        activate_gates(&mut gates);
        for k in 0..hidden {
            c[k] = gates[Gate::Forget as usize][k] * c_prev[k]
                + gates[Gate::Input as usize][k] * gates[Gate::Cell as usize][k];
            h[k] = gates[Gate::Output as usize][k] * c[k].tanh();
        }
        Ok((h, c))
    }

    /// Writes `Wx + Uh + b` for all four gates into `out`.
    pub(super) fn gate_preactivations(
        &self,
        x: &[f64],
        h_prev: &[f64],
        out: &mut [Vec<f64>; GATE_COUNT],
    ) {
        for g in 0..GATE_COUNT {
            self.w[g].mul_vec_into(x, &mut out[g]);
            let buf = &mut out[g];
            for (v, b) in buf.iter_mut().zip(&self.b[g]) {
                *v += b;
            }
            // u * h_prev accumulated row-wise
            for (r, v) in buf.iter_mut().enumerate() {
                *v += crate::linalg::dot(self.u[g].row(r), h_prev);
            }
        }
    }
}

/// Applies sigmoid to gates i, f, o and tanh to the candidate gate in place.
pub(super) fn activate_gates(gates: &mut [Vec<f64>; GATE_COUNT]) {
    for g in 0..3 {
        for v in gates[g].iter_mut() {
            *v = sigmoid(*v);
        }
    }
    for v in gates[Gate::Cell as usize].iter_mut() {
        *v = v.tanh();
    }
}

#[inline]
pub(super) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// All trainable parameters of the network. Gradients use this same shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmCoreParams {
    pub layers: Vec<LstmLayerParams>,
    pub dense_w: Vec<f64>,
    pub dense_b: f64,
}

impl ParamBuffers for LstmCoreParams {
    fn buffers(&self) -> Vec<&[f64]> {
        let mut out = Vec::with_capacity(self.layers.len() * 12 + 2);
        for layer in &self.layers {
            for ((w, u), b) in layer.w.iter().zip(&layer.u).zip(&layer.b) {
                out.push(w.data.as_slice());
                out.push(u.data.as_slice());
                out.push(b.as_slice());
            }
        }
        out.push(self.dense_w.as_slice());
        out.push(std::slice::from_ref(&self.dense_b));
        out
    }

    fn buffers_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::with_capacity(self.layers.len() * 12 + 2);
        for layer in &mut self.layers {
            for ((w, u), b) in layer.w.iter_mut().zip(layer.u.iter_mut()).zip(layer.b.iter_mut()) {
                out.push(w.data.as_mut_slice());
                out.push(u.data.as_mut_slice());
                out.push(b.as_mut_slice());
            }
        }
        out.push(self.dense_w.as_mut_slice());
        out.push(std::slice::from_mut(&mut self.dense_b));
        out
    }
}

/// Network architecture knobs: per-layer hidden sizes and the dropout rate
/// used at every inter-layer site and after the last layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Architecture {
    pub layer_sizes: Vec<usize>,
    pub dropout_rate: f64,
}

impl Default for Architecture {
    fn default() -> Self {
        Architecture {
            layer_sizes: vec![70, 50],
            dropout_rate: 0.2,
        }
    }
}

impl Architecture {
    pub fn validate(&self) -> Result<()> {
        if self.layer_sizes.is_empty() || self.layer_sizes.contains(&0) {
            return Err(Error::invalid_config(
                "layer_sizes",
                "need at least one layer, all sizes >= 1",
            ));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::invalid_config("dropout_rate", "must be in [0, 1)"));
        }
        Ok(())
    }
}

/// The LSTM regression network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmModel {
    pub input_size: usize,
    pub dropout_rate: f64,
    pub params: LstmCoreParams,
}

impl LstmModel {
    /// Initializes weights uniform in `+-1/sqrt(fan_in)` per matrix, biases
    /// zero except the forget gate at +1, from the given stream.
    pub fn init(input_size: usize, arch: &Architecture, rng: &mut ChaCha8Rng) -> Result<Self> {
        arch.validate()?;
        if input_size == 0 {
            return Err(Error::invalid_config("input_size", "must be >= 1"));
        }
        let mut layers = Vec::with_capacity(arch.layer_sizes.len());
        let mut input = input_size;
        for &hidden in &arch.layer_sizes {
            let mut layer = LstmLayerParams::zeros(input, hidden);
            for g in 0..GATE_COUNT {
                fill_uniform(&mut layer.w[g].data, 1.0 / (input as f64).sqrt(), rng);
                fill_uniform(&mut layer.u[g].data, 1.0 / (hidden as f64).sqrt(), rng);
            }
            layer.b[Gate::Forget as usize].fill(1.0);
            layers.push(layer);
            input = hidden;
        }
        let mut dense_w = vec![0.0; input];
        fill_uniform(&mut dense_w, 1.0 / (input as f64).sqrt(), rng);
        Ok(LstmModel {
            input_size,
            dropout_rate: arch.dropout_rate,
            params: LstmCoreParams {
                layers,
                dense_w,
                dense_b: 0.0,
            },
        })
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        self.params.layers.iter().map(|l| l.hidden_size()).collect()
    }

    pub fn last_hidden_size(&self) -> usize {
        self.params.layers.last().map_or(0, |l| l.hidden_size())
    }

    /// Structural consistency: chained layer sizes, dense head size, finite
    /// entries. Used on fresh models and after deserialization.
    pub fn validate(&self) -> Result<()> {
        if self.params.layers.is_empty() {
            return Err(Error::Bundle("model has no layers".into()));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::Bundle("dropout_rate outside [0, 1)".into()));
        }
        let mut input = self.input_size;
        for layer in &self.params.layers {
            layer.check()?;
            if layer.input_size() != input {
                return Err(Error::shape("layer input size", input, layer.input_size()));
            }
            input = layer.hidden_size();
        }
        if self.params.dense_w.len() != input {
            return Err(Error::shape("dense head size", input, self.params.dense_w.len()));
        }
        for buf in self.params.buffers() {
            if buf.iter().any(|v| !v.is_finite()) {
                return Err(Error::Bundle("non-finite parameter".into()));
            }
        }
        Ok(())
    }
}

fn fill_uniform(buf: &mut [f64], bound: f64, rng: &mut ChaCha8Rng) {
    for v in buf.iter_mut() {
        *v = rng.gen_range(-bound..bound);
    }
}
