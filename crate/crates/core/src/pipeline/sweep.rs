//! Architecture sweep: one cross-validation run per candidate layer layout.

use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use super::cv::run_cv;
use crate::data::WritingSession;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub layer_sizes: Vec<usize>,
    /// Child-level cross-validation means; percentages for the ratios.
    pub accuracy_pct: Option<f64>,
    pub f1_pct: Option<f64>,
    pub rmse: f64,
}

/// Runs `run_cv` once per grid entry, preserving grid order.
pub fn architecture_sweep(
    cohort: &[WritingSession],
    cfg: &PipelineConfig,
    grid: &[Vec<usize>],
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::EmptyInput("architecture grid is empty".into()));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for layer_sizes in grid {
        let mut sweep_cfg = cfg.clone();
        sweep_cfg.layer_sizes = layer_sizes.clone();
        let report = run_cv(cohort, &sweep_cfg)?;
        let agg = report.child_aggregate();
        rows.push(SweepRow {
            layer_sizes: layer_sizes.clone(),
            accuracy_pct: agg.mean.accuracy.map(|a| 100.0 * a),
            f1_pct: agg.mean.f1.map(|f| 100.0 * f),
            rmse: agg.mean.rmse,
        });
    }
    Ok(rows)
}

/// `num_layers,hidden_units_l1,hidden_units_l2,hidden_units_l3,accuracy_pct,f1_pct,rmse`
/// with `-` for absent layers and `NA` for undefined metrics.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "num_layers,hidden_units_l1,hidden_units_l2,hidden_units_l3,accuracy_pct,f1_pct,rmse\n",
    );
    for r in rows {
        let units: Vec<String> = (0..3)
            .map(|i| {
                r.layer_sizes
                    .get(i)
                    .map_or_else(|| "-".to_string(), |u| u.to_string())
            })
            .collect();
        let cell = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.layer_sizes.len(),
            units[0],
            units[1],
            units[2],
            cell(r.accuracy_pct),
            cell(r.f1_pct),
            r.rmse,
        ));
    }
    out
}
