use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::adam::{adam_step, zeroed_like, AdamState, ParamBuffers};
use super::backward::batch_gradients;
use super::forward::{forward_cached, forward_sequence, Mode};
use super::model::{Architecture, LstmLayerParams, LstmModel};
use super::train::{mse_loss, train, TrainConfig};
use crate::data::{LabeledWindow, NUM_CHANNELS};
use crate::linalg::Matrix;
use crate::seeds;

fn window(n: usize, rng: &mut ChaCha8Rng, label: f64) -> LabeledWindow {
    let values = Matrix::from_fn(n, NUM_CHANNELS, |_, _| rng.gen_range(-1.0..1.0));
    LabeledWindow {
        values,
        sems_label: label,
        source_child: "t".into(),
    }
}

fn tiny_model(seed: u64, dropout: f64) -> LstmModel {
    let arch = Architecture {
        layer_sizes: vec![5, 4],
        dropout_rate: dropout,
    };
    let mut rng = seeds::rng(seed, "test_init");
    LstmModel::init(NUM_CHANNELS, &arch, &mut rng).unwrap()
}

#[test]
fn cell_forward_zero_weights_gives_zero_state() {
    let model = tiny_model(1, 0.0);
    let mut layer = model.params.layers[0].clone();
    for g in 0..4 {
        layer.w[g].data.fill(0.0);
        layer.u[g].data.fill(0.0);
        layer.b[g].fill(0.0);
    }
    let x = vec![0.3; NUM_CHANNELS];
    let (h, c) = layer
        .cell_forward(&x, &vec![0.0; 5], &vec![0.0; 5])
        .unwrap();
    // sigmoid(0) = 0.5 but the candidate tanh(0) = 0 and c_prev = 0
    assert!(h.iter().all(|v| *v == 0.0));
    assert!(c.iter().all(|v| *v == 0.0));
}

#[test]
fn cell_forward_scalar_hand_example() {
    // scalar cell, all weights 1, biases 0, x = 0, h_prev = 0, c_prev = 1:
    // all gates sigmoid(0) = 0.5, candidate tanh(0) = 0,
    // c = 0.5 * 1 + 0.5 * 0 = 0.5, h = 0.5 * tanh(0.5)
    let layer = LstmLayerParams {
        w: std::array::from_fn(|_| Matrix {
            rows: 1,
            cols: 1,
            data: vec![1.0],
        }),
        u: std::array::from_fn(|_| Matrix {
            rows: 1,
            cols: 1,
            data: vec![1.0],
        }),
        b: std::array::from_fn(|_| vec![0.0]),
    };
    let (h, c) = layer.cell_forward(&[0.0], &[0.0], &[1.0]).unwrap();
    assert!((c[0] - 0.5).abs() < 1e-15);
    assert!((h[0] - 0.5 * 0.5f64.tanh()).abs() < 1e-15);
    assert!((h[0] - 0.231_058_579).abs() < 1e-6);
}

#[test]
fn cell_forward_rejects_bad_input_length() {
    let model = tiny_model(2, 0.0);
    let layer = &model.params.layers[0];
    let err = layer.cell_forward(&vec![0.0; 9], &vec![0.0; 5], &vec![0.0; 5]);
    assert!(err.is_err());
}

#[test]
fn forward_zero_model_predicts_dense_bias() {
    let mut model = tiny_model(3, 0.0);
    for buf in model.params.buffers_mut() {
        buf.fill(0.0);
    }
    model.params.dense_b = 2.75;
    let mut rng = seeds::rng(0, "fw");
    let w = window(7, &mut rng, 0.0);
    let (pred, trace) = forward_sequence(&model, &w, Mode::Infer, &mut rng).unwrap();
    assert_eq!(pred, 2.75);
    assert_eq!(trace.layers.len(), 2);
    assert_eq!(trace.layers[0].hidden.rows, 7);
    assert!(trace.layers.iter().all(|l| l.hidden.data.iter().all(|v| *v == 0.0)));
}

#[test]
fn zero_dropout_makes_train_equal_infer() {
    let model = tiny_model(4, 0.0);
    let mut rng = seeds::rng(1, "fw");
    let w = window(9, &mut rng, 0.0);
    let (p_train, _) = forward_sequence(&model, &w, Mode::Train, &mut rng.clone()).unwrap();
    let (p_infer, _) = forward_sequence(&model, &w, Mode::Infer, &mut rng).unwrap();
    assert_eq!(p_train.to_bits(), p_infer.to_bits());
}

#[test]
fn infer_is_bit_deterministic() {
    let model = tiny_model(5, 0.35);
    let mut rng = seeds::rng(2, "fw");
    let w = window(11, &mut rng, 0.0);
    let (a, _) = forward_sequence(&model, &w, Mode::Infer, &mut rng).unwrap();
    let (b, _) = forward_sequence(&model, &w, Mode::Infer, &mut rng).unwrap();
    assert_eq!(a.to_bits(), b.to_bits());
}

#[test]
fn mse_loss_examples() {
    assert_eq!(mse_loss(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
    assert_eq!(mse_loss(&[2.0], &[0.0]).unwrap(), 4.0);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p: Vec<f64> = (0..40).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let t: Vec<f64> = (0..40).map(|_| rng.gen_range(-3.0..3.0)).collect();
    // independent accumulation oracle
    let mut acc = 0.0;
    for i in 0..p.len() {
        acc += (p[i] - t[i]).powi(2);
    }
    assert!((mse_loss(&p, &t).unwrap() - acc / 40.0).abs() < 1e-12);
    assert!(mse_loss(&[], &[]).is_err());
    assert!(mse_loss(&[1.0], &[1.0, 2.0]).is_err());
}

#[test]
fn dense_bias_gradient_is_twice_the_residual() {
    let model = tiny_model(6, 0.0);
    let mut rng = seeds::rng(3, "fw");
    let w = window(7, &mut rng, 1.5);
    let pred = {
        let mut r = rng.clone();
        forward_cached(&model, &w, Mode::Infer, &mut r).unwrap().prediction
    };
    let (_, grads) = batch_gradients(&model, std::slice::from_ref(&w), &[9]).unwrap();
    assert!((grads.dense_b - 2.0 * (pred - 1.5)).abs() < 1e-12);
}

#[test]
fn zero_residual_batch_has_zero_gradients() {
    let mut model = tiny_model(7, 0.0);
    for buf in model.params.buffers_mut() {
        buf.fill(0.0);
    }
    model.params.dense_b = 3.0;
    let mut rng = seeds::rng(4, "fw");
    let batch: Vec<LabeledWindow> = (0..3).map(|_| window(6, &mut rng, 3.0)).collect();
    let (loss, grads) = batch_gradients(&model, &batch, &[1, 2, 3]).unwrap();
    assert_eq!(loss, 0.0);
    for buf in grads.buffers() {
        assert!(buf.iter().all(|v| *v == 0.0));
    }
}

/// Flattened central finite differences against the analytic gradients.
/// The loss is the batch-mean squared error; masks are fixed per window by
/// seed, so train mode is a deterministic function of the parameters.
fn max_rel_grad_error(model: &LstmModel, batch: &[LabeledWindow], seeds_: &[u64]) -> f64 {
    let (_, analytic) = batch_gradients(model, batch, seeds_).unwrap();

    let loss_of = |m: &LstmModel| -> f64 {
        let inv_b = 1.0 / batch.len() as f64;
        batch
            .iter()
            .zip(seeds_)
            .map(|(w, s)| {
                let mut rng = ChaCha8Rng::seed_from_u64(*s);
                let p = forward_cached(m, w, Mode::Train, &mut rng).unwrap().prediction;
                (p - w.sems_label) * (p - w.sems_label) * inv_b
            })
            .sum()
    };

    let eps = 1e-5;
    let flat_analytic: Vec<f64> = analytic.buffers().concat();
    let mut worst: f64 = 0.0;
    let n_buffers = model.params.buffers().len();
    let mut flat_idx = 0;
    for b in 0..n_buffers {
        let len = model.params.buffers()[b].len();
        for j in 0..len {
            let mut plus = model.clone();
            plus.params.buffers_mut()[b][j] += eps;
            let mut minus = model.clone();
            minus.params.buffers_mut()[b][j] -= eps;
            let numeric = (loss_of(&plus) - loss_of(&minus)) / (2.0 * eps);
            let a = flat_analytic[flat_idx];
            let denom = a.abs().max(numeric.abs()).max(1e-6);
            worst = worst.max((a - numeric).abs() / denom);
            flat_idx += 1;
        }
    }
    worst
}

#[test]
fn gradients_match_finite_differences() {
    let mut rng = seeds::rng(10, "fd");
    for trial in 0..3 {
        let model = tiny_model(100 + trial, 0.0);
        let batch: Vec<LabeledWindow> = (0..3)
            .map(|_| {
                let label = rng.gen_range(0.0..2.0);
                window(7, &mut rng, label)
            })
            .collect();
        let worst = max_rel_grad_error(&model, &batch, &[11, 22, 33]);
        assert!(worst < 1e-4, "trial {trial}: max relative error {worst}");
    }
}

#[test]
fn gradients_match_finite_differences_with_dropout_masks() {
    let mut rng = seeds::rng(11, "fd");
    let model = tiny_model(200, 0.3);
    let batch: Vec<LabeledWindow> = (0..2)
        .map(|_| {
            let label = rng.gen_range(0.0..2.0);
            window(6, &mut rng, label)
        })
        .collect();
    let worst = max_rel_grad_error(&model, &batch, &[7, 8]);
    assert!(worst < 1e-4, "max relative error {worst}");
}

#[test]
fn adam_first_step_matches_hand_computation() {
    // w = 0, g = 1, lr = 0.005: m_hat = 1, v_hat = 1, step = lr / (1 + eps)
    let mut model = tiny_model(8, 0.0);
    for buf in model.params.buffers_mut() {
        buf.fill(0.0);
    }
    let mut grads = zeroed_like(&model.params);
    grads.dense_b = 1.0;
    let mut state = AdamState::new(&model.params);
    let cfg = TrainConfig::default();
    adam_step(&mut model.params, &grads, &mut state, &cfg).unwrap();
    assert!((model.params.dense_b + 0.005).abs() < 1e-9);
    assert_eq!(state.t, 1);
    // zero gradient leaves every other parameter untouched
    assert!(model.params.dense_w.iter().all(|v| *v == 0.0));
}

#[test]
fn adam_zero_gradient_keeps_parameters() {
    let mut model = tiny_model(9, 0.0);
    let before = model.params.clone();
    let grads = zeroed_like(&model.params);
    let mut state = AdamState::new(&model.params);
    adam_step(&mut model.params, &grads, &mut state, &TrainConfig::default()).unwrap();
    assert_eq!(model.params, before);
}

/// Independent scalar Adam oracle.
struct ScalarAdam {
    m: f64,
    v: f64,
    t: u32,
}

impl ScalarAdam {
    fn step(&mut self, w: &mut f64, g: f64, cfg: &TrainConfig) {
        self.t += 1;
        self.m = cfg.beta1 * self.m + (1.0 - cfg.beta1) * g;
        self.v = cfg.beta2 * self.v + (1.0 - cfg.beta2) * g * g;
        let m_hat = self.m / (1.0 - cfg.beta1.powi(self.t as i32));
        let v_hat = self.v / (1.0 - cfg.beta2.powi(self.t as i32));
        *w -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.adam_epsilon);
    }
}

#[test]
fn adam_matches_scalar_oracle_over_100_steps() {
    let mut model = tiny_model(12, 0.0);
    for buf in model.params.buffers_mut() {
        buf.fill(0.0);
    }
    let cfg = TrainConfig::default();
    let mut state = AdamState::new(&model.params);
    let mut oracle = ScalarAdam { m: 0.0, v: 0.0, t: 0 };
    let mut w_oracle = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let g = rng.gen_range(-2.0..2.0);
        let mut grads = zeroed_like(&model.params);
        grads.dense_b = g;
        adam_step(&mut model.params, &grads, &mut state, &cfg).unwrap();
        oracle.step(&mut w_oracle, g, &cfg);
        assert!((model.params.dense_b - w_oracle).abs() < 1e-12);
    }
}

#[test]
fn inverted_dropout_preserves_expectation() {
    // Average the first dropout site's output over many mask draws and
    // compare to the undropped activations, elementwise within 3 standard
    // errors of the Bernoulli estimator.
    let model = tiny_model(13, 0.2);
    let mut rng = seeds::rng(5, "drop");
    let w = window(5, &mut rng, 0.0);
    let infer_cache = forward_cached(&model, &w, Mode::Infer, &mut rng.clone()).unwrap();
    let h = &infer_cache.layers[0].h;

    let draws = 20_000usize;
    let mut sums = vec![0.0; h.data.len()];
    for d in 0..draws {
        let mut mask_rng = ChaCha8Rng::seed_from_u64(1_000 + d as u64);
        let cache = forward_cached(&model, &w, Mode::Train, &mut mask_rng).unwrap();
        for (s, v) in sums.iter_mut().zip(&cache.layers[0].dropped.data) {
            *s += v;
        }
    }
    let p = model.dropout_rate;
    for (i, s) in sums.iter().enumerate() {
        let mean = s / draws as f64;
        let expected = h.data[i];
        // std of (mask * h) with mask in {0, 1/(1-p)}: |h| * sqrt(p / (1-p))
        let se = expected.abs() * (p / (1.0 - p)).sqrt() / (draws as f64).sqrt();
        assert!(
            (mean - expected).abs() <= 3.0 * se + 1e-12,
            "unit {i}: mean {mean} vs {expected} (3 se = {})",
            3.0 * se
        );
    }
}

fn constant_label_set(count: usize, n: usize, label: f64, seed: u64) -> Vec<LabeledWindow> {
    let mut rng = seeds::rng(seed, "const_data");
    (0..count).map(|_| window(n, &mut rng, label)).collect()
}

#[test]
fn learns_a_constant_label() {
    let train_set = constant_label_set(30, 12, 1.0, 20);
    let val_set = constant_label_set(8, 12, 1.0, 21);
    let cfg = TrainConfig {
        epochs: 50,
        rng_seed: 7,
        ..TrainConfig::default()
    };
    let arch = Architecture {
        layer_sizes: vec![8, 6],
        dropout_rate: 0.2,
    };
    let (_, history) = train(&train_set, &val_set, &cfg, &arch).unwrap();
    assert_eq!(history.train_mse.len(), 50);
    let best_val_rmse = history.val_mse[history.best_epoch].sqrt();
    assert!(best_val_rmse < 0.1, "validation RMSE {best_val_rmse}");
    assert!(
        history.train_mse.last().unwrap() < history.train_mse.first().unwrap(),
        "training loss should decrease"
    );
}

#[test]
fn single_epoch_history_and_determinism() {
    let train_set = constant_label_set(12, 8, 0.5, 30);
    let val_set = constant_label_set(4, 8, 0.5, 31);
    let cfg = TrainConfig {
        epochs: 1,
        rng_seed: 3,
        ..TrainConfig::default()
    };
    let arch = Architecture {
        layer_sizes: vec![6, 5],
        dropout_rate: 0.1,
    };
    let (m1, h1) = train(&train_set, &val_set, &cfg, &arch).unwrap();
    assert_eq!(h1.train_mse.len(), 1);
    let (m2, h2) = train(&train_set, &val_set, &cfg, &arch).unwrap();
    assert_eq!(h1, h2);
    // bit-identical trained parameters
    for (a, b) in m1.params.buffers().iter().zip(m2.params.buffers().iter()) {
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }
}

#[test]
fn model_json_round_trip_is_bit_exact() {
    let model = tiny_model(14, 0.2);
    let json = serde_json::to_string(&model).unwrap();
    let back: LstmModel = serde_json::from_str(&json).unwrap();
    back.validate().unwrap();
    for (a, b) in model.params.buffers().iter().zip(back.params.buffers().iter()) {
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }
}
