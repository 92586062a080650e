//! Forward pass with per-window attention tensors.

use super::model::ImvModel;
use crate::data::{LabeledWindow, NUM_CHANNELS};
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

/// Per-window attention output: mixture probabilities over channels and
/// temporal weights per channel.
#[derive(Debug, Clone)]
pub struct ImvAttention {
    /// Softmax mixture over the 10 channels; sums to 1.
    pub mixture: [f64; NUM_CHANNELS],
    /// `n x 10`; column v is channel v's temporal softmax, summing to 1.
    pub temporal: Matrix,
}

/// Everything backward needs from one forward sweep.
pub(super) struct ImvCache {
    /// Per channel: gate activations, cell and hidden sequences, all n x d.
    pub gates: Vec<[Matrix; 4]>,
    pub c: Vec<Matrix>,
    pub h: Vec<Matrix>,
    /// Per channel temporal weights (n).
    pub alpha: Vec<Vec<f64>>,
    /// Per channel `[context; h_last]` features (2d).
    pub feat: Vec<Vec<f64>>,
    pub mu: [f64; NUM_CHANNELS],
    pub p: [f64; NUM_CHANNELS],
    pub prediction: f64,
}

fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().fold(f64::NEG_INFINITY, |a, b| a.max(*b));
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|e| e / sum).collect()
}

pub(super) fn forward_cached(model: &ImvModel, window: &LabeledWindow) -> Result<ImvCache> {
    if window.values.cols != NUM_CHANNELS {
        return Err(Error::shape("window channels", NUM_CHANNELS, window.values.cols));
    }
    let n = window.values.rows;
    if n == 0 {
        return Err(Error::EmptyInput("window has no timesteps".into()));
    }
    let d = model.seg_size;

    let mut gates = Vec::with_capacity(NUM_CHANNELS);
    let mut c_all = Vec::with_capacity(NUM_CHANNELS);
    let mut h_all = Vec::with_capacity(NUM_CHANNELS);
    let mut alpha_all = Vec::with_capacity(NUM_CHANNELS);
    let mut feat_all = Vec::with_capacity(NUM_CHANNELS);
    let mut mu = [0.0; NUM_CHANNELS];
    let mut z = [0.0; NUM_CHANNELS];

    for (v, blk) in model.params.blocks.iter().enumerate() {
        let mut g: [Matrix; 4] = std::array::from_fn(|_| Matrix::zeros(n, d));
        let mut c = Matrix::zeros(n, d);
        let mut h = Matrix::zeros(n, d);
        let mut h_prev = vec![0.0; d];
        let mut c_prev = vec![0.0; d];
        for t in 0..n {
            let x = window.values.get(t, v);
            for k in 0..d {
                let pre = |gate: usize| {
                    blk.w[gate][k] * x + dot(blk.u[gate].row(k), &h_prev) + blk.b[gate][k]
                };
                let gi = sigmoid(pre(0));
                let gf = sigmoid(pre(1));
                let go = sigmoid(pre(2));
                let gg = pre(3).tanh();
                let ct = gf * c_prev[k] + gi * gg;
                g[0].set(t, k, gi);
                g[1].set(t, k, gf);
                g[2].set(t, k, go);
                g[3].set(t, k, gg);
                c.set(t, k, ct);
                h.set(t, k, go * ct.tanh());
            }
            for k in 0..d {
                c_prev[k] = c.get(t, k);
                h_prev[k] = h.get(t, k);
            }
        }

        let scores: Vec<f64> = (0..n).map(|t| dot(&blk.attn_w, h.row(t)) + blk.attn_b).collect();
        let alpha = softmax(&scores);
        let mut context = vec![0.0; d];
        for t in 0..n {
            crate::linalg::axpy(alpha[t], h.row(t), &mut context);
        }
        let mut feat = Vec::with_capacity(2 * d);
        feat.extend_from_slice(&context);
        feat.extend_from_slice(h.row(n - 1));
        mu[v] = dot(&blk.head_w, &feat) + blk.head_b;
        z[v] = dot(&blk.mix_w, &feat) + blk.mix_b;

        gates.push(g);
        c_all.push(c);
        h_all.push(h);
        alpha_all.push(alpha);
        feat_all.push(feat);
    }

    let p_vec = softmax(&z);
    let p: [f64; NUM_CHANNELS] = std::array::from_fn(|v| p_vec[v]);
    let prediction = p.iter().zip(&mu).map(|(pv, mv)| pv * mv).sum();

    Ok(ImvCache {
        gates,
        c: c_all,
        h: h_all,
        alpha: alpha_all,
        feat: feat_all,
        mu,
        p,
        prediction,
    })
}

/// Scores one window and returns the attention tensors behind the score.
pub fn imv_forward(model: &ImvModel, window: &LabeledWindow) -> Result<(f64, ImvAttention)> {
    let cache = forward_cached(model, window)?;
    let n = window.values.rows;
    let mut temporal = Matrix::zeros(n, NUM_CHANNELS);
    for v in 0..NUM_CHANNELS {
        for t in 0..n {
            temporal.set(t, v, cache.alpha[v][t]);
        }
    }
    Ok((
        cache.prediction,
        ImvAttention {
            mixture: cache.p,
            temporal,
        },
    ))
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}
