//! Evaluation formulas: RMSE, threshold-based confusion counts, and the
//! derived classification metrics.
//!
//! A score at or above the threshold counts as a positive
//! (handwriting-difficulty) case. Metrics whose denominator is zero are
//! reported as undefined (`None`), never as 0, so aggregation can skip them
//! explicitly; the CSV form writes `NA`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Scores >= threshold are positive cases. Default 7.
    pub threshold: f64,
    pub scale_max: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            threshold: 7.0,
            scale_max: 12.0,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0 && self.threshold <= self.scale_max) {
            return Err(Error::invalid_config(
                "eval.threshold",
                format!("must be in (0, scale_max = {}]", self.scale_max),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// The six derived metrics; `None` marks an undefined (0/0) value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationMetrics {
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub accuracy: Option<f64>,
    pub f1: Option<f64>,
}

/// Root mean squared error: `sqrt(sum((p - a)^2) / n)`.
pub fn rmse(predicted: &[f64], actual: &[f64]) -> Result<f64> {
    check_pair(predicted, actual)?;
    let n = predicted.len() as f64;
    let ss: f64 = predicted
        .iter()
        .zip(actual)
        .map(|(p, a)| (p - a) * (p - a))
        .sum();
    Ok((ss / n).sqrt())
}

/// Confusion counts at the configured threshold; the boundary uses `>=`.
pub fn confusion(predicted: &[f64], actual: &[f64], cfg: &EvalConfig) -> Result<ConfusionCounts> {
    check_pair(predicted, actual)?;
    let mut c = ConfusionCounts {
        tp: 0,
        fp: 0,
        tn: 0,
        fn_: 0,
    };
    for (p, a) in predicted.iter().zip(actual) {
        match (*p >= cfg.threshold, *a >= cfg.threshold) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(c)
}

/// Derives the six classification metrics from confusion counts.
pub fn classify_metrics(c: &ConfusionCounts) -> Result<ClassificationMetrics> {
    if c.total() == 0 {
        return Err(Error::EmptyInput("confusion counts are all zero".into()));
    }
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            None
        } else {
            Some(num as f64 / den as f64)
        }
    };
    let sensitivity = ratio(c.tp, c.tp + c.fn_);
    let specificity = ratio(c.tn, c.tn + c.fp);
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = sensitivity;
    let accuracy = Some((c.tp + c.tn) as f64 / c.total() as f64);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    Ok(ClassificationMetrics {
        sensitivity,
        specificity,
        precision,
        recall,
        accuracy,
        f1,
    })
}

/// Flat `metric,value` CSV with `NA` for undefined metrics.
pub fn metrics_csv(rmse: f64, m: &ClassificationMetrics) -> String {
    fn cell(v: Option<f64>) -> String {
        v.map_or_else(|| "NA".to_string(), |x| x.to_string())
    }
    format!(
        "metric,value\nrmse,{}\naccuracy,{}\nf1,{}\nsensitivity,{}\nspecificity,{}\nprecision,{}\nrecall,{}\n",
        rmse,
        cell(m.accuracy),
        cell(m.f1),
        cell(m.sensitivity),
        cell(m.specificity),
        cell(m.precision),
        cell(m.recall),
    )
}

fn check_pair(predicted: &[f64], actual: &[f64]) -> Result<()> {
    if predicted.is_empty() {
        return Err(Error::EmptyInput("no prediction/target pairs".into()));
    }
    if predicted.len() != actual.len() {
        return Err(Error::shape(
            "prediction/target lengths",
            predicted.len(),
            actual.len(),
        ));
    }
    Ok(())
}
