//! Scoring one session with a fitted pipeline.

use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use super::train::{lstm_score, TrainedModels};
use crate::data::{normalize, segment_session, WritingSession};
use crate::error::Result;
use crate::svr::predict_svr;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorePrediction {
    pub child_id: String,
    /// Mean of the per-window LSTM scores.
    pub lstm_score: f64,
    /// SVR output over `(lstm_score, age, gender)`, clamped to the scale.
    pub final_score: f64,
    pub per_window_scores: Vec<f64>,
}

/// Segment, normalize, score every window, average, combine with age and
/// gender, clamp.
pub fn predict_sems(
    session: &WritingSession,
    models: &TrainedModels,
    cfg: &PipelineConfig,
) -> Result<ScorePrediction> {
    let windows = segment_session(session, cfg.num_segments, cfg.window_len)?;
    let mut per_window_scores = Vec::with_capacity(windows.len());
    for w in &windows {
        per_window_scores.push(lstm_score(&models.lstm, &normalize(w, &models.stats))?);
    }
    let lstm_mean = per_window_scores.iter().sum::<f64>() / per_window_scores.len() as f64;
    let final_score = predict_svr(
        &models.svr,
        &[lstm_mean, session.meta.age_years, session.meta.gender.encoded()],
    );
    Ok(ScorePrediction {
        child_id: session.meta.child_id.clone(),
        lstm_score: lstm_mean,
        final_score,
        per_window_scores,
    })
}
