//! Scratch probe for the interpretability-recovery protocol (not shipped).

use sensoscore::attention::{importance_report, train_imv};
use sensoscore::data::{
    fit_channel_stats, generate_synthetic_cohort, normalize, segment_session, Informative,
    LabeledWindow, SynthConfig,
};
use sensoscore::lstm::TrainConfig;
use sensoscore::seeds;

fn main() {
    let synth = SynthConfig {
        cohort_size: 16,
        frames_per_session: 1200,
        label_noise: 0.1,
        informative: Informative::SingleChannel(0),
        ..SynthConfig::default()
    };
    for (epochs, lr) in [(40usize, 0.005f64), (80, 0.01), (120, 0.01), (150, 0.02)] {
        let mut wins = 0;
        let mut rmse_sum = 0.0;
        for seed in 0..4u64 {
            let cohort = generate_synthetic_cohort(&synth, 4200 + seed).unwrap();
            let mut train_windows: Vec<LabeledWindow> = Vec::new();
            let mut val_windows: Vec<LabeledWindow> = Vec::new();
            for (i, s) in cohort.iter().enumerate() {
                let ws = segment_session(s, 10, 120).unwrap();
                if i % 8 == 7 {
                    val_windows.extend(ws);
                } else {
                    train_windows.extend(ws);
                }
            }
            let stats = fit_channel_stats(&train_windows).unwrap();
            for w in train_windows.iter_mut() {
                *w = normalize(w, &stats);
            }
            for w in val_windows.iter_mut() {
                *w = normalize(w, &stats);
            }
            let cfg = TrainConfig {
                epochs,
                learning_rate: lr,
                rng_seed: seeds::derive_indexed(99, "imv_accept", seed),
                ..TrainConfig::default()
            };
            let model = train_imv(&train_windows, &val_windows, &cfg, 8).unwrap();
            let report = importance_report(&model, &val_windows).unwrap();
            let preds: Vec<f64> = val_windows
                .iter()
                .map(|w| sensoscore::attention::imv_forward(&model, w).unwrap().0)
                .collect();
            let targets: Vec<f64> = val_windows.iter().map(|w| w.sems_label).collect();
            let rmse = sensoscore::metrics::rmse(&preds, &targets).unwrap();
            rmse_sum += rmse;
            if report.ranking[0] == 0 {
                wins += 1;
            }
            println!(
                "epochs={epochs} lr={lr} seed={seed}: top={} p_tip={:.3} val_rmse={:.3}",
                sensoscore::data::CHANNEL_NAMES[report.ranking[0]],
                report.overall[0],
                rmse
            );
        }
        println!(
            "== epochs={epochs} lr={lr}: wins {wins}/4, mean val rmse {:.3}\n",
            rmse_sum / 4.0
        );
    }
}
