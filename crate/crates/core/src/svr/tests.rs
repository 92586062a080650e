use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

/// Dense projected-gradient oracle for the same 2n-variable dual the SMO
/// solver works on: gradient steps with a Gershgorin step size, projected
/// onto the box intersected with the equality constraint by bisection.
/// Deliberately shares no code with the solver.
fn pg_oracle(
    points: &[[f64; SVR_FEATURES]],
    targets: &[f64],
    kernel: &Kernel,
    c: f64,
    eps: f64,
) -> (Vec<f64>, f64) {
    let n = points.len();
    let m = 2 * n;
    let sign = |k: usize| if k < n { 1.0 } else { -1.0 };
    let pt = |k: usize| k % n;

    let mut q = vec![0.0; m * m];
    for k in 0..m {
        for l in 0..m {
            q[k * m + l] = sign(k) * sign(l) * kernel.apply(&points[pt(k)], &points[pt(l)]);
        }
    }
    let p: Vec<f64> = (0..m).map(|k| eps - sign(k) * targets[pt(k)]).collect();

    let lipschitz = (0..m)
        .map(|k| (0..m).map(|l| q[k * m + l].abs()).sum::<f64>())
        .fold(0.0f64, f64::max)
        + 1.0;
    let step = 1.0 / lipschitz;

    let project = |v: &[f64]| -> Vec<f64> {
        let r = v.iter().fold(0.0f64, |a, b| a.max(b.abs())) + c + 1.0;
        let (mut lo, mut hi) = (-r, r);
        let eval = |lam: f64| -> f64 {
            (0..m)
                .map(|k| sign(k) * (v[k] - lam * sign(k)).clamp(0.0, c))
                .sum()
        };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if eval(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let lam = 0.5 * (lo + hi);
        (0..m).map(|k| (v[k] - lam * sign(k)).clamp(0.0, c)).collect()
    };

    let mut u = vec![0.0; m];
    for _ in 0..200_000 {
        let mut v = vec![0.0; m];
        for k in 0..m {
            let g: f64 = (0..m).map(|l| q[k * m + l] * u[l]).sum::<f64>() + p[k];
            v[k] = u[k] - step * g;
        }
        let next = project(&v);
        let delta: f64 = next
            .iter()
            .zip(&u)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        u = next;
        if delta < 1e-14 {
            break;
        }
    }

    // bias from free variables of the converged point
    let grad: Vec<f64> = (0..m)
        .map(|k| (0..m).map(|l| q[k * m + l] * u[l]).sum::<f64>() + p[k])
        .collect();
    let band = 1e-6 * c;
    let free: Vec<usize> = (0..m).filter(|&k| u[k] > band && u[k] < c - band).collect();
    let bias = if free.is_empty() {
        let ups: Vec<f64> = (0..m)
            .filter(|&k| if sign(k) > 0.0 { u[k] < c } else { u[k] > 0.0 })
            .map(|k| -sign(k) * grad[k])
            .collect();
        let lows: Vec<f64> = (0..m)
            .filter(|&k| if sign(k) > 0.0 { u[k] > 0.0 } else { u[k] < c })
            .map(|k| -sign(k) * grad[k])
            .collect();
        let hi = ups.iter().fold(f64::NEG_INFINITY, |a, b| a.max(*b));
        let lo = lows.iter().fold(f64::INFINITY, |a, b| a.min(*b));
        0.5 * (hi + lo)
    } else {
        free.iter().map(|&k| -sign(k) * grad[k]).sum::<f64>() / free.len() as f64
    };

    let beta = (0..n).map(|i| u[i] - u[n + i]).collect();
    (beta, bias)
}

fn oracle_predict(
    points: &[[f64; SVR_FEATURES]],
    beta: &[f64],
    bias: f64,
    kernel: &Kernel,
    x: &[f64; SVR_FEATURES],
) -> f64 {
    bias + points
        .iter()
        .zip(beta)
        .map(|(p, b)| b * kernel.apply(p, x))
        .sum::<f64>()
}

/// Standardizes rows the same way `fit_svr` does, so the oracle solves the
/// identical problem.
fn standardized(rows: &[[f64; SVR_FEATURES]]) -> Vec<[f64; SVR_FEATURES]> {
    let n = rows.len() as f64;
    let mut out = vec![[0.0; SVR_FEATURES]; rows.len()];
    for f in 0..SVR_FEATURES {
        let mean = rows.iter().map(|r| r[f]).sum::<f64>() / n;
        let var = rows.iter().map(|r| (r[f] - mean).powi(2)).sum::<f64>() / n;
        let std = if var.sqrt() <= f64::EPSILON * (1.0 + mean.abs()) {
            1.0
        } else {
            var.sqrt()
        };
        for (o, r) in out.iter_mut().zip(rows) {
            o[f] = (r[f] - mean) / std;
        }
    }
    out
}

#[test]
fn constant_targets_predict_the_constant() {
    let rows: Vec<[f64; 3]> = (0..5).map(|i| [i as f64, 7.0 + i as f64, (i % 2) as f64]).collect();
    let targets = vec![4.5; 5];
    let model = fit_svr(&rows, &targets, &SvrHyper::default()).unwrap();
    for r in &rows {
        assert!((predict_svr(&model, r) - 4.5).abs() < 1e-6);
    }
    assert!((predict_svr(&model, &[99.0, 1.0, 0.0]) - 4.5).abs() < 1e-6);
    assert!(model.sum_dual_coefs().abs() < 1e-8);
}

#[test]
fn linear_data_matches_qp_oracle() {
    // 5 points on a plane, linear kernel, tight tube
    let rows: Vec<[f64; 3]> = vec![
        [0.0, 6.0, 0.0],
        [1.0, 7.0, 1.0],
        [2.0, 8.0, 0.0],
        [3.0, 9.0, 1.0],
        [4.0, 10.0, 0.0],
    ];
    let targets: Vec<f64> = rows.iter().map(|r| 1.5 * r[0] + 0.25 * r[1] - 0.5).collect();
    let hyper = SvrHyper {
        epsilon: 0.01,
        kernel: KernelChoice::Linear,
        scale_max: 100.0,
        ..SvrHyper::default()
    };
    let model = fit_svr(&rows, &targets, &hyper).unwrap();

    let std_rows = standardized(&rows);
    let (beta, bias) = pg_oracle(&std_rows, &targets, &Kernel::Linear, hyper.c, hyper.epsilon);
    for (i, r) in rows.iter().enumerate() {
        let ours = model.predict_raw(r);
        let oracle = oracle_predict(&std_rows, &beta, bias, &Kernel::Linear, &std_rows[i]);
        assert!(
            (ours - oracle).abs() < 1e-3,
            "row {i}: {ours} vs oracle {oracle}"
        );
    }
}

#[test]
fn random_small_problems_match_qp_oracle_rbf() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for case in 0..6 {
        let n = rng.gen_range(3..=6);
        let rows: Vec<[f64; 3]> = (0..n)
            .map(|_| [rng.gen_range(-2.0..2.0), rng.gen_range(6.0..10.0), rng.gen_range(0.0..1.0)])
            .collect();
        let targets: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
        let hyper = SvrHyper {
            c: 5.0,
            epsilon: 0.1,
            gamma: Some(0.5),
            scale_max: 100.0,
            ..SvrHyper::default()
        };
        let model = fit_svr(&rows, &targets, &hyper).unwrap();
        let kernel = Kernel::Rbf { gamma: 0.5 };
        let std_rows = standardized(&rows);
        let (beta, bias) = pg_oracle(&std_rows, &targets, &kernel, hyper.c, hyper.epsilon);
        for (i, r) in rows.iter().enumerate() {
            let ours = model.predict_raw(r);
            let oracle = oracle_predict(&std_rows, &beta, bias, &kernel, &std_rows[i]);
            assert!(
                (ours - oracle).abs() < 1e-3,
                "case {case} row {i}: {ours} vs {oracle}"
            );
        }
        assert!(model.sum_dual_coefs().abs() < 1e-8, "case {case}");
        let audit = kkt_audit(&model, &rows, &targets);
        assert!(
            audit.max_nonbound_violation < 1e-2,
            "case {case}: KKT violation {}",
            audit.max_nonbound_violation
        );
    }
}

#[test]
fn single_row_is_an_error() {
    let err = fit_svr(&[[1.0, 2.0, 3.0]], &[1.0], &SvrHyper::default());
    assert!(err.is_err());
    assert!(fit_svr(&[], &[], &SvrHyper::default()).is_err());
}

#[test]
fn non_finite_input_is_an_error() {
    let rows = [[1.0, f64::NAN, 0.0], [2.0, 3.0, 1.0]];
    assert!(fit_svr(&rows, &[1.0, 2.0], &SvrHyper::default()).is_err());
}

#[test]
fn zero_duals_predict_the_clamped_bias() {
    let model = SvrModel {
        kernel: Kernel::Linear,
        support_vectors: vec![],
        sv_indices: vec![],
        dual_coefs: vec![],
        bias: 13.2,
        feature_mean: [0.0; 3],
        feature_std: [1.0; 3],
        c: 10.0,
        epsilon: 0.1,
        clamp_max: 12.0,
    };
    assert_eq!(predict_svr(&model, &[0.0, 0.0, 0.0]), 12.0);
    assert_eq!(model.predict_raw(&[5.0, 5.0, 5.0]), 13.2);
}

#[test]
fn fit_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let rows: Vec<[f64; 3]> = (0..8)
        .map(|_| [rng.gen_range(0.0..10.0), rng.gen_range(6.0..10.0), rng.gen_range(0.0..1.0)])
        .collect();
    let targets: Vec<f64> = (0..8).map(|_| rng.gen_range(0.0..12.0)).collect();
    let a = fit_svr(&rows, &targets, &SvrHyper::default()).unwrap();
    let b = fit_svr(&rows, &targets, &SvrHyper::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn epsilon_separable_data_reaches_zero_tube_loss() {
    // targets exactly on a hyperplane, wide tube, generous C
    let rows: Vec<[f64; 3]> = (0..7)
        .map(|i| [i as f64, 8.0 - 0.5 * i as f64, (i % 2) as f64])
        .collect();
    let targets: Vec<f64> = rows.iter().map(|r| 0.8 * r[0] - 0.3 * r[1] + 5.0).collect();
    let hyper = SvrHyper {
        c: 100.0,
        epsilon: 0.1,
        kernel: KernelChoice::Linear,
        scale_max: 100.0,
        ..SvrHyper::default()
    };
    let model = fit_svr(&rows, &targets, &hyper).unwrap();
    for (r, t) in rows.iter().zip(&targets) {
        let loss = (model.predict_raw(r) - t).abs() - hyper.epsilon;
        assert!(loss < 1e-3, "tube violation {loss}");
    }
}

#[test]
fn duals_respect_the_box() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let rows: Vec<[f64; 3]> = (0..10)
        .map(|_| [rng.gen_range(0.0..10.0), rng.gen_range(6.0..10.0), rng.gen_range(0.0..1.0)])
        .collect();
    let targets: Vec<f64> = (0..10).map(|_| rng.gen_range(0.0..12.0)).collect();
    let hyper = SvrHyper {
        c: 2.0,
        ..SvrHyper::default()
    };
    let model = fit_svr(&rows, &targets, &hyper).unwrap();
    for b in &model.dual_coefs {
        assert!(b.abs() <= hyper.c + 1e-8);
    }
}
