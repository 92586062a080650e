//! Backward pass through the mixture, both softmaxes, and each channel's
//! cell chain.

use super::forward::ImvCache;
use super::model::{ImvModel, ImvParams};
use crate::data::{LabeledWindow, NUM_CHANNELS};
use crate::error::Result;
use crate::linalg::dot;
use crate::lstm::ParamBuffers;

/// Gradients of `dpred * prediction` for one window.
pub(super) fn backward_window(
    model: &ImvModel,
    window: &LabeledWindow,
    cache: &ImvCache,
    dpred: f64,
) -> ImvParams {
    let n = window.values.rows;
    let d = model.seg_size;
    let mut g_params = zeroed(&model.params);

    // mixture: pred = sum_v p_v mu_v, p = softmax(z)
    let dmu: Vec<f64> = (0..NUM_CHANNELS).map(|v| dpred * cache.p[v]).collect();
    let dp: Vec<f64> = (0..NUM_CHANNELS).map(|v| dpred * cache.mu[v]).collect();
    let dot_pp: f64 = (0..NUM_CHANNELS).map(|v| dp[v] * cache.p[v]).sum();
    let dz: Vec<f64> = (0..NUM_CHANNELS)
        .map(|v| cache.p[v] * (dp[v] - dot_pp))
        .collect();

    for v in 0..NUM_CHANNELS {
        let blk = &model.params.blocks[v];
        let gblk = &mut g_params.blocks[v];
        let h = &cache.h[v];
        let alpha = &cache.alpha[v];
        let feat = &cache.feat[v];

        // heads
        for (gw, f) in gblk.head_w.iter_mut().zip(feat) {
            *gw += dmu[v] * f;
        }
        gblk.head_b += dmu[v];
        for (gw, f) in gblk.mix_w.iter_mut().zip(feat) {
            *gw += dz[v] * f;
        }
        gblk.mix_b += dz[v];

        // feature gradient splits into context and final-hidden parts
        let mut dfeat = vec![0.0; 2 * d];
        for k in 0..2 * d {
            dfeat[k] = dmu[v] * blk.head_w[k] + dz[v] * blk.mix_w[k];
        }
        let dcontext = &dfeat[..d];
        let dh_last_extra = &dfeat[d..];

        // context = sum_t alpha_t h_t
        let mut dalpha = vec![0.0; n];
        let mut dh_seq = vec![0.0; n * d]; // external dh at each timestep
        for t in 0..n {
            dalpha[t] = dot(dcontext, h.row(t));
            crate::linalg::axpy(alpha[t], dcontext, &mut dh_seq[t * d..(t + 1) * d]);
        }
        // temporal softmax backward: alpha = softmax(e)
        let dot_aa: f64 = (0..n).map(|t| dalpha[t] * alpha[t]).sum();
        let de: Vec<f64> = (0..n).map(|t| alpha[t] * (dalpha[t] - dot_aa)).collect();
        // e_t = attn_w . h_t + attn_b
        for t in 0..n {
            crate::linalg::axpy(de[t], h.row(t), &mut gblk.attn_w);
            gblk.attn_b += de[t];
            crate::linalg::axpy(de[t], &blk.attn_w, &mut dh_seq[t * d..(t + 1) * d]);
        }
        crate::linalg::axpy(1.0, dh_last_extra, &mut dh_seq[(n - 1) * d..n * d]);

        // BPTT through the scalar-input cell chain
        let mut dh_next = vec![0.0; d];
        let mut dc_next = vec![0.0; d];
        let mut da = [vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]];
        for t in (0..n).rev() {
            let gi = cache.gates[v][0].row(t);
            let gf = cache.gates[v][1].row(t);
            let go = cache.gates[v][2].row(t);
            let gg = cache.gates[v][3].row(t);
            for k in 0..d {
                let dh = dh_next[k] + dh_seq[t * d + k];
                let c = cache.c[v].get(t, k);
                let tanh_c = c.tanh();
                let dc = dc_next[k] + dh * go[k] * (1.0 - tanh_c * tanh_c);
                let c_prev = if t == 0 { 0.0 } else { cache.c[v].get(t - 1, k) };
                da[2][k] = dh * tanh_c * go[k] * (1.0 - go[k]);
                da[1][k] = dc * c_prev * gf[k] * (1.0 - gf[k]);
                da[0][k] = dc * gg[k] * gi[k] * (1.0 - gi[k]);
                da[3][k] = dc * gi[k] * (1.0 - gg[k] * gg[k]);
                dc_next[k] = dc * gf[k];
            }
            let x = window.values.get(t, v);
            dh_next.fill(0.0);
            for gate in 0..4 {
                crate::linalg::axpy(x, &da[gate], &mut gblk.w[gate]);
                if t > 0 {
                    gblk.u[gate].add_outer(&da[gate], cache.h[v].row(t - 1));
                }
                for (b, dav) in gblk.b[gate].iter_mut().zip(&da[gate]) {
                    *b += dav;
                }
                blk.u[gate].tr_mul_vec_acc(&da[gate], &mut dh_next);
            }
        }
    }
    g_params
}

fn zeroed(like: &ImvParams) -> ImvParams {
    let mut z = like.clone();
    for buf in z.buffers_mut() {
        buf.fill(0.0);
    }
    z
}

/// Squared error and gradients for one window (no dropout in this network).
pub(super) fn window_grad(
    model: &ImvModel,
    w: &LabeledWindow,
    inv_batch: f64,
) -> Result<(f64, ImvParams)> {
    let cache = super::forward::forward_cached(model, w)?;
    let err = cache.prediction - w.sems_label;
    let grads = backward_window(model, w, &cache, 2.0 * err * inv_batch);
    Ok((err * err, grads))
}
