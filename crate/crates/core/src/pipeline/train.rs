//! Full pipeline training: LSTM on windows, then SVR on per-child means.

use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use super::cv::MetricsRow;
use super::split::{sessions_of, split_children};
use crate::data::{
    fit_channel_stats, normalize, segment_session, ChannelStats, LabeledWindow, WritingSession,
};
use crate::error::{Error, Result};
use crate::lstm::{self, LstmModel, Mode, TrainingHistory};
use crate::metrics::{classify_metrics, confusion, rmse};
use crate::seeds;
use crate::svr::{fit_svr, predict_svr, SvrHyper, SvrModel, SVR_FEATURES};

/// The fitted pipeline: LSTM, SVR combiner, and the normalization statistics
/// both were trained under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModels {
    pub lstm: LstmModel,
    pub svr: SvrModel,
    pub stats: ChannelStats,
}

/// Validation-split outcome of one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub window: MetricsRow,
    pub child: MetricsRow,
    pub history: TrainingHistory,
    pub svr_hyper_used: SvrHyper,
    pub train_children: Vec<String>,
    pub val_children: Vec<String>,
    pub test_children: Vec<String>,
}

/// Segments and z-scores the sessions of the given children.
fn windows_of(
    cohort: &[WritingSession],
    children: &[String],
    cfg: &PipelineConfig,
    stats: Option<&ChannelStats>,
) -> Result<Vec<LabeledWindow>> {
    let mut out = Vec::new();
    for s in sessions_of(cohort, children) {
        let mut ws = segment_session(s, cfg.num_segments, cfg.window_len)?;
        if let Some(st) = stats {
            for w in ws.iter_mut() {
                *w = normalize(w, st);
            }
        }
        out.append(&mut ws);
    }
    Ok(out)
}

/// Builds the SVR rows `(mean lstm score, age, gender)` and child-level
/// targets for the given children. Children with several sessions pool all
/// their windows; the target is the mean of their session labels.
pub(super) fn child_rows(
    cohort: &[WritingSession],
    children: &[String],
    lstm: &LstmModel,
    windows: &[LabeledWindow],
) -> Result<(Vec<[f64; SVR_FEATURES]>, Vec<f64>)> {
    let mut rows = Vec::with_capacity(children.len());
    let mut targets = Vec::with_capacity(children.len());
    for child in children {
        let mut scores = Vec::new();
        for w in windows.iter().filter(|w| &w.source_child == child) {
            scores.push(lstm_score(lstm, w)?);
        }
        if scores.is_empty() {
            return Err(Error::EmptyInput(format!("child {child} has no windows")));
        }
        let mean = scores.iter().sum::<f64>() / scores.len() as f64;
        let sessions: Vec<&WritingSession> = cohort
            .iter()
            .filter(|s| &s.meta.child_id == child)
            .collect();
        let meta = &sessions[0].meta;
        let label =
            sessions.iter().map(|s| s.sems_label).sum::<f64>() / sessions.len() as f64;
        rows.push([mean, meta.age_years, meta.gender.encoded()]);
        targets.push(label);
    }
    Ok((rows, targets))
}

pub(super) fn lstm_score(lstm: &LstmModel, w: &LabeledWindow) -> Result<f64> {
    let mut rng = seeds::rng(0, "infer");
    Ok(lstm::forward_sequence(lstm, w, Mode::Infer, &mut rng)?.0)
}

/// Window- and child-level metrics of the fitted pipeline on a set of
/// children. Window-level applies the SVR to each window's LSTM score;
/// child-level applies it to the per-child mean.
pub(super) fn evaluate_children(
    cohort: &[WritingSession],
    children: &[String],
    models: &TrainedModels,
    cfg: &PipelineConfig,
) -> Result<(MetricsRow, MetricsRow)> {
    let windows = windows_of(cohort, children, cfg, Some(&models.stats))?;
    let mut w_preds = Vec::new();
    let mut w_actual = Vec::new();
    for w in &windows {
        let meta = cohort
            .iter()
            .find(|s| s.meta.child_id == w.source_child)
            .map(|s| &s.meta)
            .expect("window sourced from cohort");
        let score = lstm_score(&models.lstm, w)?;
        w_preds.push(predict_svr(&models.svr, &[score, meta.age_years, meta.gender.encoded()]));
        w_actual.push(w.sems_label);
    }
    let (rows, targets) = child_rows(cohort, children, &models.lstm, &windows)?;
    let c_preds: Vec<f64> = rows.iter().map(|r| predict_svr(&models.svr, r)).collect();

    Ok((
        MetricsRow::from_pairs(&w_preds, &w_actual, &cfg.eval)?,
        MetricsRow::from_pairs(&c_preds, &targets, &cfg.eval)?,
    ))
}

impl MetricsRow {
    pub(super) fn from_pairs(
        preds: &[f64],
        actual: &[f64],
        eval: &crate::metrics::EvalConfig,
    ) -> Result<Self> {
        let m = classify_metrics(&confusion(preds, actual, eval)?)?;
        Ok(MetricsRow {
            rmse: rmse(preds, actual)?,
            accuracy: m.accuracy,
            f1: m.f1,
            sensitivity: m.sensitivity,
            specificity: m.specificity,
        })
    }
}

const SVR_GRID_C: [f64; 3] = [1.0, 10.0, 100.0];
const SVR_GRID_EPS: [f64; 3] = [0.05, 0.1, 0.5];

/// Trains the whole pipeline on a by-child split of the cohort and reports
/// validation metrics. The returned models carry everything prediction
/// needs.
pub fn train_pipeline(
    cohort: &[WritingSession],
    cfg: &PipelineConfig,
) -> Result<(TrainedModels, ValidationReport)> {
    cfg.validate()?;
    let mut split_rng = seeds::rng(cfg.rng_seed, "split");
    let split = split_children(
        cohort,
        (cfg.train_frac, cfg.val_frac, cfg.test_frac),
        &mut split_rng,
    )?;

    let raw_train = windows_of(cohort, &split.train, cfg, None)
        .map_err(|e| Error::in_stage("segmentation", e))?;
    let stats = fit_channel_stats(&raw_train).map_err(|e| Error::in_stage("normalization", e))?;
    let train_windows: Vec<LabeledWindow> = raw_train.iter().map(|w| normalize(w, &stats)).collect();
    let val_windows = windows_of(cohort, &split.val, cfg, Some(&stats))
        .map_err(|e| Error::in_stage("segmentation", e))?;

    let mut train_cfg = cfg.train.clone();
    train_cfg.rng_seed = seeds::derive(cfg.rng_seed, "lstm_train");
    let (lstm, history) = lstm::train(&train_windows, &val_windows, &train_cfg, &cfg.architecture())
        .map_err(|e| Error::in_stage("lstm", e))?;

    let (rows, targets) = child_rows(cohort, &split.train, &lstm, &train_windows)
        .map_err(|e| Error::in_stage("svr", e))?;
    let (val_rows, val_targets) = child_rows(cohort, &split.val, &lstm, &val_windows)
        .map_err(|e| Error::in_stage("svr", e))?;

    let (svr, svr_hyper_used) = if cfg.svr_grid_search {
        let mut best: Option<(f64, SvrModel, SvrHyper)> = None;
        for c in SVR_GRID_C {
            for eps in SVR_GRID_EPS {
                let hyper = SvrHyper {
                    c,
                    epsilon: eps,
                    ..cfg.svr.clone()
                };
                let model = fit_svr(&rows, &targets, &hyper).map_err(|e| Error::in_stage("svr", e))?;
                let preds: Vec<f64> = val_rows.iter().map(|r| predict_svr(&model, r)).collect();
                let err = rmse(&preds, &val_targets).map_err(|e| Error::in_stage("svr", e))?;
                if best.as_ref().is_none_or(|(b, _, _)| err < *b) {
                    best = Some((err, model, hyper));
                }
            }
        }
        let (_, model, hyper) = best.expect("grid is non-empty");
        (model, hyper)
    } else {
        let model = fit_svr(&rows, &targets, &cfg.svr).map_err(|e| Error::in_stage("svr", e))?;
        (model, cfg.svr.clone())
    };

    let models = TrainedModels { lstm, svr, stats };
    let (window, child) = evaluate_children(cohort, &split.val, &models, cfg)?;
    let report = ValidationReport {
        window,
        child,
        history,
        svr_hyper_used,
        train_children: split.train,
        val_children: split.val,
        test_children: split.test,
    };
    Ok((models, report))
}
