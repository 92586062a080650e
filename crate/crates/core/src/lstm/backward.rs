//! Backpropagation through time.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::adam::{add_assign, zeroed_like};
use super::forward::{forward_cached, ForwardCache, Mode};
use super::model::{Gate, LstmCoreParams, LstmModel};
use crate::data::LabeledWindow;
use crate::error::Result;
use crate::linalg::Matrix;

/// Gradients of `dpred * prediction` with respect to every parameter, for one
/// window whose forward pass produced `cache`.
pub(super) fn backward_window(
    model: &LstmModel,
    window: &LabeledWindow,
    cache: &ForwardCache,
    dpred: f64,
) -> LstmCoreParams {
    let n = window.values.rows;
    let num_layers = model.params.layers.len();
    let mut grads = zeroed_like(&model.params);

    // Dense head: pred = dense_w . dropped_last[n-1] + dense_b.
    let last = &cache.layers[num_layers - 1];
    for (gw, y) in grads.dense_w.iter_mut().zip(last.dropped.row(n - 1)) {
        *gw = dpred * y;
    }
    grads.dense_b = dpred;

    // Gradient w.r.t. each layer's *dropped* output stream.
    let mut upstream = Matrix::zeros(n, model.last_hidden_size());
    for (v, w) in upstream
        .row_mut(n - 1)
        .iter_mut()
        .zip(&model.params.dense_w)
    {
        *v = dpred * w;
    }

    for l in (0..num_layers).rev() {
        let layer = &model.params.layers[l];
        let lc = &cache.layers[l];
        let hidden = layer.hidden_size();
        let glayer = &mut grads.layers[l];

        let mut dh_next = vec![0.0; hidden];
        let mut dc_next = vec![0.0; hidden];
        let mut dx_out = if l > 0 {
            Some(Matrix::zeros(n, layer.input_size()))
        } else {
            None
        };
        let mut da: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; hidden]);

        for t in (0..n).rev() {
            let gate_i = lc.gates[Gate::Input as usize].row(t);
            let gate_f = lc.gates[Gate::Forget as usize].row(t);
            let gate_o = lc.gates[Gate::Output as usize].row(t);
            let gate_g = lc.gates[Gate::Cell as usize].row(t);
            for k in 0..hidden {
                // upstream arrives w.r.t. dropped = mask * h
                let dh = dh_next[k] + upstream.get(t, k) * lc.mask.get(t, k);
                let c = lc.c.get(t, k);
                let tanh_c = c.tanh();
                let dc = dc_next[k] + dh * gate_o[k] * (1.0 - tanh_c * tanh_c);
                let c_prev = if t == 0 { 0.0 } else { lc.c.get(t - 1, k) };

                let d_o = dh * tanh_c;
                da[Gate::Output as usize][k] = d_o * gate_o[k] * (1.0 - gate_o[k]);
                da[Gate::Forget as usize][k] = dc * c_prev * gate_f[k] * (1.0 - gate_f[k]);
                da[Gate::Input as usize][k] = dc * gate_g[k] * gate_i[k] * (1.0 - gate_i[k]);
                da[Gate::Cell as usize][k] = dc * gate_i[k] * (1.0 - gate_g[k] * gate_g[k]);

                dc_next[k] = dc * gate_f[k];
            }

            let x_t: &[f64] = if l == 0 {
                window.values.row(t)
            } else {
                cache.layers[l - 1].dropped.row(t)
            };
            dh_next.fill(0.0);
            for g in 0..4 {
                glayer.w[g].add_outer(&da[g], x_t);
                if t > 0 {
                    glayer.u[g].add_outer(&da[g], lc.h.row(t - 1));
                }
                for (b, d) in glayer.b[g].iter_mut().zip(&da[g]) {
                    *b += d;
                }
                layer.u[g].tr_mul_vec_acc(&da[g], &mut dh_next);
                if let Some(dx) = dx_out.as_mut() {
                    layer.w[g].tr_mul_vec_acc(&da[g], dx.row_mut(t));
                }
            }
        }
        if let Some(dx) = dx_out {
            upstream = dx;
        }
    }
    grads
}

/// Mean squared error over one forward/backward pass and the batch-averaged
/// gradients. Each window draws its dropout masks from its own seed so the
/// result does not depend on evaluation order; the reduction is an ordered
/// sum over the batch.
pub fn batch_gradients(
    model: &LstmModel,
    batch: &[LabeledWindow],
    mask_seeds: &[u64],
) -> Result<(f64, LstmCoreParams)> {
    debug_assert_eq!(batch.len(), mask_seeds.len());
    let inv_b = 1.0 / batch.len() as f64;

    let one = |(w, seed): (&LabeledWindow, &u64)| -> Result<(f64, LstmCoreParams)> {
        let mut rng = ChaCha8Rng::seed_from_u64(*seed);
        let cache = forward_cached(model, w, Mode::Train, &mut rng)?;
        let err = cache.prediction - w.sems_label;
        let g = backward_window(model, w, &cache, 2.0 * err * inv_b);
        Ok((err * err, g))
    };

    #[cfg(feature = "parallel")]
    let per_window: Vec<Result<(f64, LstmCoreParams)>> = {
        use rayon::prelude::*;
        batch.par_iter().zip(mask_seeds).map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let per_window: Vec<Result<(f64, LstmCoreParams)>> =
        batch.iter().zip(mask_seeds).map(one).collect();

    let mut loss = 0.0;
    let mut total: Option<LstmCoreParams> = None;
    for r in per_window {
        let (sq, g) = r?;
        loss += sq * inv_b;
        match total.as_mut() {
            Some(acc) => add_assign(acc, &g),
            None => total = Some(g),
        }
    }
    let grads = total.ok_or_else(|| crate::error::Error::EmptyInput("empty batch".into()))?;
    Ok((loss, grads))
}
