//! Permutation importance for the SVR inputs, and the merged ranking that
//! places age and gender next to the attention-ranked sensor channels.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use super::train::{child_rows, TrainedModels};
use crate::attention::ImportanceReport;
use crate::data::{normalize, segment_session, LabeledWindow, WritingSession, CHANNEL_NAMES};
use crate::error::Result;
use crate::metrics::rmse;
use crate::seeds;
use crate::svr::{predict_svr, SVR_FEATURES};

pub const SVR_FEATURE_NAMES: [&str; SVR_FEATURES] = ["lstm_score", "age", "gender"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureImportance {
    pub feature: String,
    /// Mean increase in child-level RMSE when the feature column is shuffled.
    pub importance: f64,
}

/// Shuffle-based importance of each SVR input over the cohort: shuffle one
/// column across children, re-predict, and record the RMSE increase (mean of
/// `shuffles` seeded draws).
pub fn svr_input_importance(
    models: &TrainedModels,
    cohort: &[WritingSession],
    cfg: &PipelineConfig,
    shuffles: usize,
) -> Result<Vec<FeatureImportance>> {
    let children = super::split::unique_children(cohort);
    let mut windows: Vec<LabeledWindow> = Vec::new();
    for s in cohort {
        for w in segment_session(s, cfg.num_segments, cfg.window_len)? {
            windows.push(normalize(&w, &models.stats));
        }
    }
    let (rows, targets) = child_rows(cohort, &children, &models.lstm, &windows)?;
    let preds: Vec<f64> = rows.iter().map(|r| predict_svr(&models.svr, r)).collect();
    let base = rmse(&preds, &targets)?;

    let mut out = Vec::with_capacity(SVR_FEATURES);
    for f in 0..SVR_FEATURES {
        let mut total = 0.0;
        for s in 0..shuffles {
            let mut rng =
                seeds::rng_indexed(cfg.rng_seed, "svr_importance", (f * 1009 + s) as u64);
            let mut column: Vec<f64> = rows.iter().map(|r| r[f]).collect();
            column.shuffle(&mut rng);
            let shuffled_preds: Vec<f64> = rows
                .iter()
                .zip(&column)
                .map(|(r, v)| {
                    let mut x = *r;
                    x[f] = *v;
                    predict_svr(&models.svr, &x)
                })
                .collect();
            total += rmse(&shuffled_preds, &targets)?;
        }
        out.push(FeatureImportance {
            feature: SVR_FEATURE_NAMES[f].to_string(),
            importance: total / shuffles as f64 - base,
        });
    }
    out.sort_by(|a, b| b.importance.total_cmp(&a.importance));
    Ok(out)
}

/// `feature,importance` in descending order.
pub fn svr_importance_csv(imps: &[FeatureImportance]) -> String {
    let mut out = String::from("feature,importance\n");
    for i in imps {
        out.push_str(&format!("{},{}\n", i.feature, i.importance));
    }
    out
}

/// Merges the attention ranking of the 10 channels with the permutation
/// importance of age and gender into one list of shares summing to 1.
///
/// The permutation importances of `(lstm_score, age, gender)` are clamped at
/// zero and normalized; the `lstm_score` share is distributed over the
/// channels proportionally to their attention importance.
pub fn combined_importance(
    report: &ImportanceReport,
    svr_imps: &[FeatureImportance],
) -> Vec<(String, f64, &'static str)> {
    let weight_of = |name: &str| {
        svr_imps
            .iter()
            .find(|i| i.feature == name)
            .map_or(0.0, |i| i.importance.max(0.0))
    };
    let (w_lstm, w_age, w_gender) = (
        weight_of("lstm_score"),
        weight_of("age"),
        weight_of("gender"),
    );
    let sum = w_lstm + w_age + w_gender;
    let (w_lstm, w_age, w_gender) = if sum > 0.0 {
        (w_lstm / sum, w_age / sum, w_gender / sum)
    } else {
        (1.0, 0.0, 0.0)
    };

    let mut out: Vec<(String, f64, &'static str)> = (0..CHANNEL_NAMES.len())
        .map(|v| {
            (
                CHANNEL_NAMES[v].to_string(),
                w_lstm * report.overall[v],
                "attention",
            )
        })
        .collect();
    out.push(("age".to_string(), w_age, "permutation"));
    out.push(("gender".to_string(), w_gender, "permutation"));
    out.sort_by(|a, b| b.1.total_cmp(&a.1));
    out
}

/// `rank,name,score,source` for the merged list.
pub fn combined_csv(merged: &[(String, f64, &'static str)]) -> String {
    let mut out = String::from("rank,name,score,source\n");
    for (i, (name, score, source)) in merged.iter().enumerate() {
        out.push_str(&format!("{},{},{},{}\n", i + 1, name, score, source));
    }
    out
}
