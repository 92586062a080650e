//! Sensor data model, cohort file formats, windowing, normalization, and the
//! synthetic-cohort generator.

mod io;
mod model;
mod stats;
mod synth;
mod window;

pub use io::{parse_cohort, parse_session, write_atomic, write_cohort, MANIFEST_HEADER, SESSION_HEADER};
pub use model::{ChannelStats, ChildMeta, Gender, LabeledWindow, SensorFrame, WritingSession};
pub use stats::{denormalize, fit_channel_stats, normalize};
pub use synth::{generate_synthetic_cohort, ground_truth_score, synth_session, Informative, SynthConfig};
pub use window::segment_session;

/// Number of sensor channels recorded per frame (timestamp excluded).
pub const NUM_CHANNELS: usize = 10;

/// Channel names in storage order; this is also the session CSV column order.
pub const CHANNEL_NAMES: [&str; NUM_CHANNELS] = [
    "tip_pressure",
    "finger_pressure",
    "acc_x",
    "acc_y",
    "acc_z",
    "gyro_x",
    "gyro_y",
    "gyro_z",
    "angle",
    "writing_speed",
];
