//! Channel-importance reports and their CSV forms.

use serde::{Deserialize, Serialize};

use super::forward::imv_forward;
use super::model::ImvModel;
use crate::data::{LabeledWindow, CHANNEL_NAMES, NUM_CHANNELS};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Overall and per-timestep channel importances over an evaluation set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    /// Mean mixture probability per channel; sums to 1.
    pub overall: [f64; NUM_CHANNELS],
    /// `n x 10` mean temporal attention; each column sums to 1.
    pub per_timestep: Matrix,
    /// Channel indices sorted by descending overall importance.
    pub ranking: Vec<usize>,
}

impl ImportanceReport {
    pub fn ranked_names(&self) -> Vec<&'static str> {
        self.ranking.iter().map(|&v| CHANNEL_NAMES[v]).collect()
    }
}

/// Averages the per-window attention tensors over `windows`.
pub fn importance_report(model: &ImvModel, windows: &[LabeledWindow]) -> Result<ImportanceReport> {
    if windows.is_empty() {
        return Err(Error::EmptyInput("importance report needs windows".into()));
    }
    let n = windows[0].values.rows;
    let mut overall = [0.0; NUM_CHANNELS];
    let mut per_timestep = Matrix::zeros(n, NUM_CHANNELS);
    for w in windows {
        if w.values.rows != n {
            return Err(Error::shape("window length", n, w.values.rows));
        }
        let (_, attn) = imv_forward(model, w)?;
        for v in 0..NUM_CHANNELS {
            overall[v] += attn.mixture[v];
        }
        for (acc, a) in per_timestep.data.iter_mut().zip(&attn.temporal.data) {
            *acc += a;
        }
    }
    let inv = 1.0 / windows.len() as f64;
    for v in overall.iter_mut() {
        *v *= inv;
    }
    for v in per_timestep.data.iter_mut() {
        *v *= inv;
    }
    let mut ranking: Vec<usize> = (0..NUM_CHANNELS).collect();
    ranking.sort_by(|&a, &b| overall[b].total_cmp(&overall[a]));
    Ok(ImportanceReport {
        overall,
        per_timestep,
        ranking,
    })
}

/// `channel,score` rows in descending importance.
pub fn overall_csv(report: &ImportanceReport) -> String {
    let mut out = String::from("channel,score\n");
    for &v in &report.ranking {
        out.push_str(&format!("{},{}\n", CHANNEL_NAMES[v], report.overall[v]));
    }
    out
}

/// `t` plus one column per channel, one row per timestep.
pub fn per_timestep_csv(report: &ImportanceReport) -> String {
    let mut out = String::from("t,");
    out.push_str(&CHANNEL_NAMES.join(","));
    out.push('\n');
    for t in 0..report.per_timestep.rows {
        out.push_str(&t.to_string());
        for v in 0..NUM_CHANNELS {
            out.push_str(&format!(",{}", report.per_timestep.get(t, v)));
        }
        out.push('\n');
    }
    out
}
