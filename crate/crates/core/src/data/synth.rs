//! Seeded synthetic-cohort generator.
//!
//! Real study recordings are not distributable, so verification runs against
//! synthetic cohorts whose ground-truth score is a documented function of the
//! generated channel statistics. Tests evaluate that function independently.
//!
//! # Channel model
//!
//! Channel `c` of a session with difficulty `u` in `[0, 1]` is
//!
//! ```text
//! x_c[t] = offset_c + amp_c * sqrt(2) * sin(2*pi*freq_c*tau_t + phase_c) + noise_c * w[t]
//! ```
//!
//! with `tau_t = t * sample_period_ms / 1000`, `w[t]` iid uniform(-1, 1),
//! `freq_c` jittered per child by a factor uniform in [0.9, 1.1], and
//! `phase_c` uniform in [0, 2*pi). The `sqrt(2)` makes the sinusoid's
//! standard deviation equal `amp_c`. Per-channel constants
//! `(offset, amp_lo, amp_span, base_freq_hz, noise)`:
//!
//! | channel         | offset | amp_lo | amp_span | freq | noise |
//! |-----------------|--------|--------|----------|------|-------|
//! | tip_pressure    | 20     | 2      | 8        | 1.8  | 0.4   |
//! | finger_pressure | 15     | 1.5    | 5        | 0.9  | 0.4   |
//! | acc_x           | 0      | 0.8    | 3        | 2.2  | 0.15  |
//! | acc_y           | 0      | 0.8    | 3        | 2.6  | 0.15  |
//! | acc_z           | 9.81   | 0.8    | 3        | 3.0  | 0.15  |
//! | gyro_x          | 0      | 15     | 55       | 4.0  | 3.0   |
//! | gyro_y          | 0      | 15     | 55       | 4.6  | 3.0   |
//! | gyro_z          | 0      | 15     | 55       | 5.2  | 3.0   |
//! | angle           | 45     | 2      | 7        | 0.8  | 0.5   |
//! | writing_speed   | 22     | 3      | 9        | 1.1  | 0.8   |
//!
//! In [`Informative::AllChannels`] mode, `amp = amp_lo + amp_span * u` for
//! tip_pressure and the three gyro channels; every other channel uses the
//! fixed midpoint `amp_lo + amp_span / 2`. In [`Informative::SingleChannel`]
//! mode only the chosen channel gets the difficulty-driven amplitude; the
//! other nine become pure noise: `x = offset + (amp_lo + amp_span / 2) * w[t]`.
//!
//! # Ground-truth score
//!
//! Writing `sigma_c` for the population standard deviation of channel `c`
//! over the session as generated, and `clamp01` for clamping to `[0, 1]`:
//!
//! * AllChannels:
//!   `score = scale_max * clamp01(0.6 * clamp01((sigma_tip - 2) / 8)
//!    + 0.4 * clamp01((rho_gyro - 15) / 55))` where
//!   `rho_gyro = sqrt((var(gyro_x) + var(gyro_y) + var(gyro_z)) / 3)`.
//! * SingleChannel(c):
//!   `score = scale_max * clamp01((sigma_c - amp_lo_c) / amp_span_c)`.
//!
//! The stored label is `clamp(score + e, 0, scale_max)` with
//! `e` uniform in `[-label_noise, label_noise]`; with `label_noise = 0` the
//! label equals the score function of the generated frames exactly.
//!
//! Child difficulties are stratified: child `k` of `N` draws
//! `u = (k + 0.5 + j) / N` with `j` uniform in `[-0.25, 0.25]`, so labels
//! cover the whole scale. Ages are uniform in [6, 10]; gender is a fair coin.
//! All draws come from per-child substreams of the root seed, so cohorts are
//! byte-identical across runs with the same seed.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{ChildMeta, Gender, SensorFrame, WritingSession};
use super::NUM_CHANNELS;
use crate::error::{Error, Result};
use crate::seeds;

/// Which channels carry the difficulty signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Informative {
    /// tip_pressure and the gyro channels drive the score.
    AllChannels,
    /// Only this channel index (0..10, see [`super::CHANNEL_NAMES`]) drives
    /// the score; the rest are pure noise.
    SingleChannel(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub cohort_size: usize,
    pub frames_per_session: usize,
    pub sample_period_ms: u64,
    pub scale_max: f64,
    /// Half-width of the bounded uniform label noise, in score points.
    pub label_noise: f64,
    pub informative: Informative,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            cohort_size: 40,
            frames_per_session: 2400,
            sample_period_ms: 10,
            scale_max: 12.0,
            label_noise: 0.25,
            informative: Informative::AllChannels,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cohort_size == 0 {
            return Err(Error::invalid_config("cohort_size", "must be >= 1"));
        }
        if self.frames_per_session == 0 {
            return Err(Error::invalid_config("frames_per_session", "must be >= 1"));
        }
        if self.sample_period_ms == 0 {
            return Err(Error::invalid_config("sample_period_ms", "must be >= 1"));
        }
        if !(self.scale_max > 0.0) {
            return Err(Error::invalid_config("scale_max", "must be > 0"));
        }
        if self.label_noise < 0.0 {
            return Err(Error::invalid_config("label_noise", "must be >= 0"));
        }
        if let Informative::SingleChannel(c) = self.informative {
            if c >= NUM_CHANNELS {
                return Err(Error::invalid_config(
                    "informative",
                    format!("channel index {c} out of range 0..{NUM_CHANNELS}"),
                ));
            }
        }
        Ok(())
    }
}

/// `(offset, amp_lo, amp_span, base_freq_hz, noise)` per channel, in
/// [`super::CHANNEL_NAMES`] order. See the module docs.
const CHANNEL_PARAMS: [(f64, f64, f64, f64, f64); NUM_CHANNELS] = [
    (20.0, 2.0, 8.0, 1.8, 0.4),   // tip_pressure
    (15.0, 1.5, 5.0, 0.9, 0.4),   // finger_pressure
    (0.0, 0.8, 3.0, 2.2, 0.15),   // acc_x
    (0.0, 0.8, 3.0, 2.6, 0.15),   // acc_y
    (9.81, 0.8, 3.0, 3.0, 0.15),  // acc_z
    (0.0, 15.0, 55.0, 4.0, 3.0),  // gyro_x
    (0.0, 15.0, 55.0, 4.6, 3.0),  // gyro_y
    (0.0, 15.0, 55.0, 5.2, 3.0),  // gyro_z
    (45.0, 2.0, 7.0, 0.8, 0.5),   // angle
    (22.0, 3.0, 9.0, 1.1, 0.8),   // writing_speed
];

/// Channels whose amplitude tracks difficulty in `AllChannels` mode.
const ALL_MODE_INFORMATIVE: [usize; 4] = [0, 5, 6, 7];

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

fn channel_std(frames: &[SensorFrame], c: usize) -> f64 {
    let n = frames.len() as f64;
    let mean = frames.iter().map(|f| f.channels()[c]).sum::<f64>() / n;
    let var = frames
        .iter()
        .map(|f| (f.channels()[c] - mean).powi(2))
        .sum::<f64>()
        / n;
    var.sqrt()
}

/// The documented ground-truth score function, evaluated on generated frames.
pub fn ground_truth_score(frames: &[SensorFrame], cfg: &SynthConfig) -> f64 {
    match cfg.informative {
        Informative::AllChannels => {
            let sigma_tip = channel_std(frames, 0);
            let rho_gyro = ((channel_std(frames, 5).powi(2)
                + channel_std(frames, 6).powi(2)
                + channel_std(frames, 7).powi(2))
                / 3.0)
                .sqrt();
            let t_stat = clamp01((sigma_tip - CHANNEL_PARAMS[0].1) / CHANNEL_PARAMS[0].2);
            let g_stat = clamp01((rho_gyro - CHANNEL_PARAMS[5].1) / CHANNEL_PARAMS[5].2);
            cfg.scale_max * clamp01(0.6 * t_stat + 0.4 * g_stat)
        }
        Informative::SingleChannel(c) => {
            let (_, lo, span, _, _) = CHANNEL_PARAMS[c];
            let sigma = channel_std(frames, c);
            cfg.scale_max * clamp01((sigma - lo) / span)
        }
    }
}

/// Generates one session at the given difficulty, drawing everything after
/// age/gender from `rng`. The label is the ground-truth score of the realized
/// frames plus bounded noise.
pub fn synth_session(
    cfg: &SynthConfig,
    meta: ChildMeta,
    difficulty: f64,
    rng: &mut ChaCha8Rng,
) -> WritingSession {
    let u = clamp01(difficulty);
    let mut amp = [0.0; NUM_CHANNELS];
    let mut noise = [0.0; NUM_CHANNELS];
    let mut sine = [true; NUM_CHANNELS];
    for c in 0..NUM_CHANNELS {
        let (_, lo, span, _, base_noise) = CHANNEL_PARAMS[c];
        match cfg.informative {
            Informative::AllChannels => {
                amp[c] = if ALL_MODE_INFORMATIVE.contains(&c) {
                    lo + span * u
                } else {
                    lo + span / 2.0
                };
                noise[c] = base_noise;
            }
            Informative::SingleChannel(ic) if c == ic => {
                amp[c] = lo + span * u;
                noise[c] = base_noise;
            }
            Informative::SingleChannel(_) => {
                amp[c] = 0.0;
                noise[c] = lo + span / 2.0;
                sine[c] = false;
            }
        }
    }

    let mut freq = [0.0; NUM_CHANNELS];
    let mut phase = [0.0; NUM_CHANNELS];
    for c in 0..NUM_CHANNELS {
        freq[c] = CHANNEL_PARAMS[c].3 * rng.gen_range(0.9..1.1);
        phase[c] = rng.gen_range(0.0..std::f64::consts::TAU);
    }

    let mut frames = Vec::with_capacity(cfg.frames_per_session);
    for t in 0..cfg.frames_per_session {
        let tau = (t as u64 * cfg.sample_period_ms) as f64 / 1000.0;
        let mut ch = [0.0; NUM_CHANNELS];
        for c in 0..NUM_CHANNELS {
            let offset = CHANNEL_PARAMS[c].0;
            let carrier = if sine[c] {
                amp[c] * std::f64::consts::SQRT_2 * (std::f64::consts::TAU * freq[c] * tau + phase[c]).sin()
            } else {
                0.0
            };
            ch[c] = offset + carrier + noise[c] * rng.gen_range(-1.0..1.0);
        }
        // keep the non-negative channels non-negative
        for c in [0usize, 1, 9] {
            ch[c] = ch[c].max(0.0);
        }
        frames.push(SensorFrame::from_channels(t as u64 * cfg.sample_period_ms + 1, ch));
    }

    let score = ground_truth_score(&frames, cfg);
    let e = if cfg.label_noise > 0.0 {
        rng.gen_range(-cfg.label_noise..cfg.label_noise)
    } else {
        0.0
    };
    WritingSession {
        meta,
        frames,
        sems_label: (score + e).clamp(0.0, cfg.scale_max),
    }
}

/// Generates a full cohort, deterministically for a fixed seed.
pub fn generate_synthetic_cohort(cfg: &SynthConfig, seed: u64) -> Result<Vec<WritingSession>> {
    cfg.validate()?;
    let n = cfg.cohort_size;
    let mut cohort = Vec::with_capacity(n);
    for k in 0..n {
        let mut rng = seeds::rng_indexed(seed, "synth_child", k as u64);
        let jitter = rng.gen_range(-0.25..0.25);
        let u = clamp01((k as f64 + 0.5 + jitter) / n as f64);
        let age_years = rng.gen_range(6.0..10.0);
        let gender = if rng.gen_bool(0.5) {
            Gender::Male
        } else {
            Gender::Female
        };
        let meta = ChildMeta {
            child_id: format!("synth{k:03}"),
            age_years,
            gender,
        };
        cohort.push(synth_session(cfg, meta, u, &mut rng));
    }
    Ok(cohort)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_seed_reproduces_cohort_exactly() {
        let cfg = SynthConfig {
            cohort_size: 4,
            frames_per_session: 200,
            ..SynthConfig::default()
        };
        let a = generate_synthetic_cohort(&cfg, 42).unwrap();
        let b = generate_synthetic_cohort(&cfg, 42).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic_cohort(&cfg, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_label_noise_matches_independent_score_evaluation() {
        let cfg = SynthConfig {
            cohort_size: 6,
            frames_per_session: 300,
            label_noise: 0.0,
            ..SynthConfig::default()
        };
        let cohort = generate_synthetic_cohort(&cfg, 7).unwrap();
        for s in &cohort {
            // independent two-pass evaluation of the documented formula
            let std_of = |c: usize| {
                let vals: Vec<f64> = s.frames.iter().map(|f| f.channels()[c]).collect();
                let mean = vals.iter().sum::<f64>() / vals.len() as f64;
                (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64).sqrt()
            };
            let t_stat = ((std_of(0) - 2.0) / 8.0).clamp(0.0, 1.0);
            let rho = ((std_of(5).powi(2) + std_of(6).powi(2) + std_of(7).powi(2)) / 3.0).sqrt();
            let g_stat = ((rho - 15.0) / 55.0).clamp(0.0, 1.0);
            let expected = 12.0 * (0.6 * t_stat + 0.4 * g_stat).clamp(0.0, 1.0);
            assert!(
                (s.sems_label - expected).abs() < 1e-9,
                "label {} vs recomputed {}",
                s.sems_label,
                expected
            );
        }
    }

    #[test]
    fn sessions_satisfy_invariants_and_cover_the_scale() {
        let cfg = SynthConfig {
            cohort_size: 12,
            frames_per_session: 400,
            ..SynthConfig::default()
        };
        let cohort = generate_synthetic_cohort(&cfg, 3).unwrap();
        let mut labels = Vec::new();
        for s in &cohort {
            assert!(!s.frames.is_empty());
            assert!(s.sems_label >= 0.0 && s.sems_label <= cfg.scale_max);
            assert!(s.frames.windows(2).all(|p| p[0].timestamp_ms < p[1].timestamp_ms));
            assert!(s
                .frames
                .iter()
                .all(|f| f.tip_pressure >= 0.0 && f.finger_pressure >= 0.0 && f.writing_speed >= 0.0));
            labels.push(s.sems_label);
        }
        let lo = labels.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = labels.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(lo < 3.0 && hi > 9.0, "labels should span the scale, got [{lo}, {hi}]");
    }

    #[test]
    fn empty_cohort_is_a_config_error() {
        let cfg = SynthConfig {
            cohort_size: 0,
            ..SynthConfig::default()
        };
        match generate_synthetic_cohort(&cfg, 1).unwrap_err() {
            Error::InvalidConfig { field, .. } => assert_eq!(field, "cohort_size"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn single_channel_mode_isolates_the_signal() {
        let cfg = SynthConfig {
            cohort_size: 2,
            frames_per_session: 500,
            label_noise: 0.0,
            informative: Informative::SingleChannel(0),
            ..SynthConfig::default()
        };
        let cohort = generate_synthetic_cohort(&cfg, 11).unwrap();
        // difficulty is stratified: child 1 has much higher tip variance
        let std_of = |s: &WritingSession, c: usize| {
            let vals: Vec<f64> = s.frames.iter().map(|f| f.channels()[c]).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64).sqrt()
        };
        assert!(std_of(&cohort[1], 0) > std_of(&cohort[0], 0) + 1.0);
        // an uninformative channel has comparable spread for both children
        let r = std_of(&cohort[1], 5) / std_of(&cohort[0], 5);
        assert!(r > 0.8 && r < 1.25, "noise channels should not track difficulty, ratio {r}");
        assert!(cohort[1].sems_label > cohort[0].sems_label);
    }
}
