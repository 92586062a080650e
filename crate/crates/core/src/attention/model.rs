//! Model structure and initialization.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::NUM_CHANNELS;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::lstm::ParamBuffers;

/// Parameters for one input channel: an LSTM cell with scalar input and
/// `seg_size` hidden units, temporal-attention scoring, and the per-channel
/// prediction and mixture-evidence heads over `[context; final hidden]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarBlock {
    /// Per-gate input weights (scalar input), each `seg_size` long.
    pub w: [Vec<f64>; 4],
    /// Per-gate recurrent weights, `seg_size x seg_size`.
    pub u: [Matrix; 4],
    pub b: [Vec<f64>; 4],
    pub attn_w: Vec<f64>,
    pub attn_b: f64,
    pub head_w: Vec<f64>,
    pub head_b: f64,
    pub mix_w: Vec<f64>,
    pub mix_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImvParams {
    pub blocks: Vec<VarBlock>,
}

impl ParamBuffers for ImvParams {
    fn buffers(&self) -> Vec<&[f64]> {
        let mut out = Vec::with_capacity(self.blocks.len() * 18);
        for blk in &self.blocks {
            for ((w, u), b) in blk.w.iter().zip(&blk.u).zip(&blk.b) {
                out.push(w.as_slice());
                out.push(u.data.as_slice());
                out.push(b.as_slice());
            }
            out.push(blk.attn_w.as_slice());
            out.push(std::slice::from_ref(&blk.attn_b));
            out.push(blk.head_w.as_slice());
            out.push(std::slice::from_ref(&blk.head_b));
            out.push(blk.mix_w.as_slice());
            out.push(std::slice::from_ref(&blk.mix_b));
        }
        out
    }

    fn buffers_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::with_capacity(self.blocks.len() * 18);
        for blk in &mut self.blocks {
            for ((w, u), b) in blk.w.iter_mut().zip(blk.u.iter_mut()).zip(blk.b.iter_mut()) {
                out.push(w.as_mut_slice());
                out.push(u.data.as_mut_slice());
                out.push(b.as_mut_slice());
            }
            out.push(blk.attn_w.as_mut_slice());
            out.push(std::slice::from_mut(&mut blk.attn_b));
            out.push(blk.head_w.as_mut_slice());
            out.push(std::slice::from_mut(&mut blk.head_b));
            out.push(blk.mix_w.as_mut_slice());
            out.push(std::slice::from_mut(&mut blk.mix_b));
        }
        out
    }
}

/// The interpretable variable-wise network; total hidden size is
/// `10 * seg_size`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImvModel {
    pub seg_size: usize,
    pub params: ImvParams,
}

impl ImvModel {
    /// Same recipe as the LSTM: uniform `+-1/sqrt(fan_in)`, forget bias +1.
    pub fn init(seg_size: usize, rng: &mut ChaCha8Rng) -> Result<Self> {
        if seg_size == 0 {
            return Err(Error::invalid_config("seg_size", "must be >= 1"));
        }
        let d = seg_size;
        let blocks = (0..NUM_CHANNELS)
            .map(|_| {
                let mut blk = VarBlock {
                    w: std::array::from_fn(|_| vec![0.0; d]),
                    u: std::array::from_fn(|_| Matrix::zeros(d, d)),
                    b: std::array::from_fn(|_| vec![0.0; d]),
                    attn_w: vec![0.0; d],
                    attn_b: 0.0,
                    head_w: vec![0.0; 2 * d],
                    head_b: 0.0,
                    mix_w: vec![0.0; 2 * d],
                    mix_b: 0.0,
                };
                for g in 0..4 {
                    fill(&mut blk.w[g], 1.0, rng);
                    fill(&mut blk.u[g].data, 1.0 / (d as f64).sqrt(), rng);
                }
                blk.b[1].fill(1.0); // forget gate
                fill(&mut blk.attn_w, 1.0 / (d as f64).sqrt(), rng);
                fill(&mut blk.head_w, 1.0 / (2.0 * d as f64).sqrt(), rng);
                fill(&mut blk.mix_w, 1.0 / (2.0 * d as f64).sqrt(), rng);
                blk
            })
            .collect();
        Ok(ImvModel {
            seg_size,
            params: ImvParams { blocks },
        })
    }
}

fn fill(buf: &mut [f64], bound: f64, rng: &mut ChaCha8Rng) {
    for v in buf.iter_mut() {
        *v = rng.gen_range(-bound..bound);
    }
}
