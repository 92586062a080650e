//! Core domain types.

use serde::{Deserialize, Serialize};

use super::NUM_CHANNELS;
use crate::linalg::Matrix;

/// One timestamped sample of the 10 pen channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorFrame {
    /// Milliseconds since session start; strictly increasing within a session.
    pub timestamp_ms: u64,
    /// Pen-tip pressure, sensor units, >= 0.
    pub tip_pressure: f64,
    /// Finger-grip pressure, sensor units, >= 0.
    pub finger_pressure: f64,
    pub acc_x: f64,
    pub acc_y: f64,
    pub acc_z: f64,
    pub gyro_x: f64,
    pub gyro_y: f64,
    pub gyro_z: f64,
    /// Pen tilt, degrees.
    pub angle: f64,
    /// mm/s, >= 0.
    pub writing_speed: f64,
}

impl SensorFrame {
    /// The 10 value channels in [`super::CHANNEL_NAMES`] order.
    pub fn channels(&self) -> [f64; NUM_CHANNELS] {
        [
            self.tip_pressure,
            self.finger_pressure,
            self.acc_x,
            self.acc_y,
            self.acc_z,
            self.gyro_x,
            self.gyro_y,
            self.gyro_z,
            self.angle,
            self.writing_speed,
        ]
    }

    pub fn from_channels(timestamp_ms: u64, ch: [f64; NUM_CHANNELS]) -> Self {
        SensorFrame {
            timestamp_ms,
            tip_pressure: ch[0],
            finger_pressure: ch[1],
            acc_x: ch[2],
            acc_y: ch[3],
            acc_z: ch[4],
            gyro_x: ch[5],
            gyro_y: ch[6],
            gyro_z: ch[7],
            angle: ch[8],
            writing_speed: ch[9],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Female,
    Male,
}

impl Gender {
    /// Numeric encoding used as a model feature: female = 0, male = 1.
    pub fn encoded(self) -> f64 {
        match self {
            Gender::Female => 0.0,
            Gender::Male => 1.0,
        }
    }

    /// The cohort manifest literal, `f` or `m`.
    pub fn literal(self) -> &'static str {
        match self {
            Gender::Female => "f",
            Gender::Male => "m",
        }
    }
}

/// Child metadata attached to a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChildMeta {
    pub child_id: String,
    pub age_years: f64,
    pub gender: Gender,
}

/// A child's full recording plus metadata and the therapist-assigned score.
#[derive(Debug, Clone, PartialEq)]
pub struct WritingSession {
    pub meta: ChildMeta,
    pub frames: Vec<SensorFrame>,
    /// SEMS points; 0..=scale_max (12 for print writing, up to 14 configurable).
    pub sems_label: f64,
}

/// A fixed `window_len x 10` slice of a session, carrying the session label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledWindow {
    /// Row t holds the 10 channel values at timestep t.
    pub values: Matrix,
    pub sems_label: f64,
    pub source_child: String,
}

impl LabeledWindow {
    pub fn len(&self) -> usize {
        self.values.rows
    }

    pub fn is_empty(&self) -> bool {
        self.values.rows == 0
    }
}

/// Per-channel normalization statistics fitted on training windows only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelStats {
    pub mean: [f64; NUM_CHANNELS],
    /// Strictly positive; degenerate channels are substituted with 1.
    pub std: [f64; NUM_CHANNELS],
}
