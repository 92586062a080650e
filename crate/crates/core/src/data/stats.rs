//! Per-channel z-score normalization.
//!
//! Statistics are fitted on training windows only and applied everywhere
//! else; a constant channel gets its standard deviation substituted with 1 so
//! normalization never divides by zero.

use super::model::{ChannelStats, LabeledWindow};
use super::NUM_CHANNELS;
use crate::error::{Error, Result};

/// Pooled per-channel mean and (population) standard deviation over all
/// timesteps of all supplied windows, via Welford's online update.
pub fn fit_channel_stats(windows: &[LabeledWindow]) -> Result<ChannelStats> {
    if windows.is_empty() {
        return Err(Error::EmptyInput("fit_channel_stats needs windows".into()));
    }
    let mut count = 0u64;
    let mut mean = [0.0f64; NUM_CHANNELS];
    let mut m2 = [0.0f64; NUM_CHANNELS];
    for w in windows {
        for t in 0..w.values.rows {
            count += 1;
            let row = w.values.row(t);
            for c in 0..NUM_CHANNELS {
                let delta = row[c] - mean[c];
                mean[c] += delta / count as f64;
                m2[c] += delta * (row[c] - mean[c]);
            }
        }
    }
    let mut std = [0.0f64; NUM_CHANNELS];
    for c in 0..NUM_CHANNELS {
        let s = (m2[c] / count as f64).sqrt();
        std[c] = if s <= f64::EPSILON * (1.0 + mean[c].abs()) {
            1.0
        } else {
            s
        };
    }
    Ok(ChannelStats { mean, std })
}

/// `(value - mean_c) / std_c` per channel; label and shape unchanged.
pub fn normalize(window: &LabeledWindow, stats: &ChannelStats) -> LabeledWindow {
    let mut out = window.clone();
    for t in 0..out.values.rows {
        let row = out.values.row_mut(t);
        for c in 0..NUM_CHANNELS {
            row[c] = (row[c] - stats.mean[c]) / stats.std[c];
        }
    }
    out
}

/// Inverse of [`normalize`].
pub fn denormalize(window: &LabeledWindow, stats: &ChannelStats) -> LabeledWindow {
    let mut out = window.clone();
    for t in 0..out.values.rows {
        let row = out.values.row_mut(t);
        for c in 0..NUM_CHANNELS {
            row[c] = row[c] * stats.std[c] + stats.mean[c];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn window_from(rows: Vec<[f64; NUM_CHANNELS]>) -> LabeledWindow {
        let mut values = Matrix::zeros(rows.len(), NUM_CHANNELS);
        for (t, r) in rows.iter().enumerate() {
            values.row_mut(t).copy_from_slice(r);
        }
        LabeledWindow {
            values,
            sems_label: 1.0,
            source_child: "c".into(),
        }
    }

    /// Independent two-pass mean/variance used as the oracle.
    fn two_pass(windows: &[LabeledWindow], c: usize) -> (f64, f64) {
        let vals: Vec<f64> = windows
            .iter()
            .flat_map(|w| (0..w.values.rows).map(|t| w.values.get(t, c)).collect::<Vec<_>>())
            .collect();
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        (mean, var.sqrt())
    }

    #[test]
    fn constant_channel_gets_unit_std() {
        let w = window_from(vec![[5.0; NUM_CHANNELS]; 4]);
        let stats = fit_channel_stats(std::slice::from_ref(&w)).unwrap();
        assert_eq!(stats.mean[0], 5.0);
        assert_eq!(stats.std[0], 1.0);
    }

    #[test]
    fn symmetric_values_have_zero_mean() {
        let w = window_from(vec![[-1.0; NUM_CHANNELS], [1.0; NUM_CHANNELS]]);
        let stats = fit_channel_stats(std::slice::from_ref(&w)).unwrap();
        assert!(stats.mean[3].abs() < 1e-15);
        assert!((stats.std[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn welford_matches_two_pass_oracle() {
        let mut rows = Vec::new();
        for t in 0..57 {
            let mut r = [0.0; NUM_CHANNELS];
            for (c, v) in r.iter_mut().enumerate() {
                *v = ((t * 31 + c * 7) as f64).sin() * (c as f64 + 1.0) + c as f64;
            }
            rows.push(r);
        }
        let windows = vec![window_from(rows[..30].to_vec()), window_from(rows[30..].to_vec())];
        let stats = fit_channel_stats(&windows).unwrap();
        for c in 0..NUM_CHANNELS {
            let (mean, std) = two_pass(&windows, c);
            assert!((stats.mean[c] - mean).abs() < 1e-10, "channel {c} mean");
            assert!((stats.std[c] - std).abs() < 1e-10, "channel {c} std");
        }
    }

    #[test]
    fn pooled_stats_equal_union_stats() {
        let a: Vec<LabeledWindow> = (0..3)
            .map(|i| {
                window_from(
                    (0..11)
                        .map(|t| {
                            let mut r = [0.0; NUM_CHANNELS];
                            for (c, v) in r.iter_mut().enumerate() {
                                *v = ((i * 100 + t * 13 + c) as f64).cos() * 3.0;
                            }
                            r
                        })
                        .collect(),
                )
            })
            .collect();
        let b: Vec<LabeledWindow> = (0..2)
            .map(|i| {
                window_from(
                    (0..7)
                        .map(|t| {
                            let mut r = [0.0; NUM_CHANNELS];
                            for (c, v) in r.iter_mut().enumerate() {
                                *v = ((i * 55 + t * 17 + c * 3) as f64).sin() - 1.0;
                            }
                            r
                        })
                        .collect(),
                )
            })
            .collect();
        let union: Vec<LabeledWindow> = a.iter().chain(&b).cloned().collect();
        let pooled = fit_channel_stats(&union).unwrap();
        for c in 0..NUM_CHANNELS {
            let (mean, std) = two_pass(&union, c);
            assert!((pooled.mean[c] - mean).abs() < 1e-10);
            assert!((pooled.std[c] - std).abs() < 1e-10);
        }
    }

    #[test]
    fn normalize_centers_and_round_trips() {
        let stats = ChannelStats {
            mean: [2.0; NUM_CHANNELS],
            std: [4.0; NUM_CHANNELS],
        };
        let w = window_from(vec![[2.0; NUM_CHANNELS]; 3]);
        let z = normalize(&w, &stats);
        assert!(z.values.data.iter().all(|v| *v == 0.0));
        assert_eq!(z.sems_label, w.sems_label);

        let identity = ChannelStats {
            mean: [0.0; NUM_CHANNELS],
            std: [1.0; NUM_CHANNELS],
        };
        let same = normalize(&w, &identity);
        assert_eq!(same.values.data, w.values.data);

        let w2 = window_from(vec![[7.25; NUM_CHANNELS], [-3.5; NUM_CHANNELS]]);
        let back = denormalize(&normalize(&w2, &stats), &stats);
        for (a, b) in back.values.data.iter().zip(&w2.values.data) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(fit_channel_stats(&[]).is_err());
    }
}
