//! Monte-Carlo cross-validation: independent seeded trials, each holding out
//! a random tenth of the children, with mean-and-standard-deviation
//! aggregation per metric.

use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use super::train::{evaluate_children, train_pipeline};
use crate::data::WritingSession;
use crate::error::Result;
use crate::seeds;

/// One row of evaluation metrics; `None` marks an undefined metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub rmse: f64,
    pub accuracy: Option<f64>,
    pub f1: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
}

impl MetricsRow {
    fn values(&self) -> [Option<f64>; 5] {
        [
            Some(self.rmse),
            self.accuracy,
            self.f1,
            self.sensitivity,
            self.specificity,
        ]
    }

    fn from_values(v: [Option<f64>; 5]) -> Self {
        MetricsRow {
            rmse: v[0].unwrap_or(f64::NAN),
            accuracy: v[1],
            f1: v[2],
            sensitivity: v[3],
            specificity: v[4],
        }
    }

    fn csv_cells(&self) -> String {
        self.values()
            .iter()
            .map(|v| v.map_or_else(|| "NA".to_string(), |x| x.to_string()))
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub window: MetricsRow,
    pub child: MetricsRow,
    pub train_children: Vec<String>,
    pub val_children: Vec<String>,
    pub test_children: Vec<String>,
}

/// Mean and population standard deviation per metric, over the trials where
/// the metric was defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelAggregate {
    pub level: String,
    pub mean: MetricsRow,
    pub std: MetricsRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub trials: Vec<TrialRecord>,
    pub aggregates: Vec<LevelAggregate>,
}

pub(super) fn aggregate(trials: &[TrialRecord]) -> Vec<LevelAggregate> {
    let levels: [(&str, fn(&TrialRecord) -> &MetricsRow); 2] =
        [("window", |t| &t.window), ("child", |t| &t.child)];
    levels
        .iter()
        .map(|(level, get)| {
            let mut means = [None; 5];
            let mut stds = [None; 5];
            for k in 0..5 {
                let vals: Vec<f64> = trials
                    .iter()
                    .filter_map(|t| get(t).values()[k])
                    .collect();
                if !vals.is_empty() {
                    let n = vals.len() as f64;
                    let mean = vals.iter().sum::<f64>() / n;
                    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
                    means[k] = Some(mean);
                    stds[k] = Some(var.sqrt());
                }
            }
            LevelAggregate {
                level: level.to_string(),
                mean: MetricsRow::from_values(means),
                std: MetricsRow::from_values(stds),
            }
        })
        .collect()
}

impl CvReport {
    /// `trial,level,rmse,accuracy,f1,sensitivity,specificity`, one row per
    /// trial per level, then `mean`/`std` rows per level.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,level,rmse,accuracy,f1,sensitivity,specificity\n");
        for t in &self.trials {
            out.push_str(&format!("{},window,{}\n", t.trial, t.window.csv_cells()));
            out.push_str(&format!("{},child,{}\n", t.trial, t.child.csv_cells()));
        }
        for agg in &self.aggregates {
            out.push_str(&format!("mean,{},{}\n", agg.level, agg.mean.csv_cells()));
            out.push_str(&format!("std,{},{}\n", agg.level, agg.std.csv_cells()));
        }
        out
    }

    /// Child-level aggregate, for sweeps and summaries.
    pub fn child_aggregate(&self) -> &LevelAggregate {
        self.aggregates
            .iter()
            .find(|a| a.level == "child")
            .expect("aggregates always carry both levels")
    }
}

/// Runs `cfg.trials` independent trials. Trial `k` re-splits the cohort by
/// child under the derived seed, trains the full pipeline on its train/val
/// children, and evaluates on its held-out test children at window and child
/// level.
pub fn run_cv(cohort: &[WritingSession], cfg: &PipelineConfig) -> Result<CvReport> {
    cfg.validate()?;
    let mut trials = Vec::with_capacity(cfg.trials);
    for k in 0..cfg.trials {
        let mut trial_cfg = cfg.clone();
        trial_cfg.rng_seed = seeds::derive_indexed(cfg.rng_seed, "cv_trial", k as u64);
        let (models, report) = train_pipeline(cohort, &trial_cfg)?;
        let (window, child) =
            evaluate_children(cohort, &report.test_children, &models, &trial_cfg)?;
        trials.push(TrialRecord {
            trial: k + 1,
            window,
            child,
            train_children: report.train_children,
            val_children: report.val_children,
            test_children: report.test_children,
        });
    }
    let aggregates = aggregate(&trials);
    Ok(CvReport { trials, aggregates })
}
