//! Activation-trace export: the plot data for comparing input signals with
//! the per-layer hidden activations of one window.

use std::path::{Path, PathBuf};

use super::config::PipelineConfig;
use super::train::TrainedModels;
use crate::data::{normalize, segment_session, write_atomic, WritingSession, CHANNEL_NAMES};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::lstm::{forward_sequence, Mode};
use crate::seeds;

#[derive(Debug, Clone)]
pub struct TraceFiles {
    pub files: Vec<PathBuf>,
    pub prediction: f64,
    pub window_index: usize,
}

fn matrix_csv(m: &Matrix, header_cols: &[String]) -> String {
    let mut out = String::from("t,");
    out.push_str(&header_cols.join(","));
    out.push('\n');
    for t in 0..m.rows {
        out.push_str(&t.to_string());
        for c in 0..m.cols {
            out.push_str(&format!(",{}", m.get(t, c)));
        }
        out.push('\n');
    }
    out
}

/// Writes `trace_input.csv` (the raw window) and `trace_layer<k>.csv` (that
/// layer's hidden-state sequence) under `out_dir` for the chosen window of
/// the session. Returns the file list and the window's prediction.
pub fn dump_trace(
    session: &WritingSession,
    models: &TrainedModels,
    cfg: &PipelineConfig,
    out_dir: &Path,
    window_index: usize,
) -> Result<TraceFiles> {
    let windows = segment_session(session, cfg.num_segments, cfg.window_len)?;
    let raw = windows.get(window_index).ok_or_else(|| {
        Error::shape("window index", format!("< {}", windows.len()), window_index)
    })?;
    let normalized = normalize(raw, &models.stats);
    let mut rng = seeds::rng(0, "trace");
    let (prediction, trace) = forward_sequence(&models.lstm, &normalized, Mode::Infer, &mut rng)?;

    std::fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut files = Vec::new();
    let input_path = out_dir.join("trace_input.csv");
    let channel_names: Vec<String> = CHANNEL_NAMES.iter().map(|s| s.to_string()).collect();
    write_atomic(&input_path, &matrix_csv(&raw.values, &channel_names))?;
    files.push(input_path);
    for (k, layer) in trace.layers.iter().enumerate() {
        let cols: Vec<String> = (0..layer.hidden.cols).map(|i| format!("h{i}")).collect();
        let path = out_dir.join(format!("trace_layer{}.csv", k + 1));
        write_atomic(&path, &matrix_csv(&layer.hidden, &cols))?;
        files.push(path);
    }
    Ok(TraceFiles {
        files,
        prediction,
        window_index,
    })
}
