//! Session segmentation into fixed-length labeled windows.

use super::model::{LabeledWindow, WritingSession};
use super::NUM_CHANNELS;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Cuts `num_segments` windows of `window_len` frames from a session.
///
/// Window `k` starts at `floor(k * (T - window_len) / (num_segments - 1))`,
/// so starts span the whole session uniformly: contiguous and non-overlapping
/// when `T = num_segments * window_len`, overlapping when the session is
/// shorter. Every window carries the session's label.
pub fn segment_session(
    session: &WritingSession,
    num_segments: usize,
    window_len: usize,
) -> Result<Vec<LabeledWindow>> {
    if num_segments == 0 {
        return Err(Error::invalid_config("num_segments", "must be >= 1"));
    }
    if window_len == 0 {
        return Err(Error::invalid_config("window_len", "must be >= 1"));
    }
    let total = session.frames.len();
    if total < window_len {
        return Err(Error::TooShortSession {
            frames: total,
            window_len,
        });
    }

    let span = total - window_len;
    if span == 0 && num_segments > 1 {
        log::warn!(
            "session {}: {} frames = one window; emitting {} duplicate windows",
            session.meta.child_id,
            total,
            num_segments
        );
    }

    let mut windows = Vec::with_capacity(num_segments);
    for k in 0..num_segments {
        let start = if num_segments == 1 {
            0
        } else {
            k * span / (num_segments - 1)
        };
        let mut values = Matrix::zeros(window_len, NUM_CHANNELS);
        for (t, frame) in session.frames[start..start + window_len].iter().enumerate() {
            values.row_mut(t).copy_from_slice(&frame.channels());
        }
        windows.push(LabeledWindow {
            values,
            sems_label: session.sems_label,
            source_child: session.meta.child_id.clone(),
        });
    }
    Ok(windows)
}
