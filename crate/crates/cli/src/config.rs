//! TOML configuration file.
//!
//! Every key is optional; omitted keys take the engine defaults. A `--seed`
//! flag overrides the file's `seed`. One top-level `scale_max` feeds the
//! synthetic generator, the evaluation threshold config, and the SVR clamp,
//! so the score scale cannot drift apart between stages.
//!
//! ```toml
//! seed = 42
//! scale_max = 12.0
//!
//! [synth]
//! cohort_size = 40
//! frames_per_session = 2400
//! sample_period_ms = 10
//! label_noise = 0.25
//! informative = "all"            # or a channel name, e.g. "tip_pressure"
//!
//! [pipeline]
//! window_len = 120
//! num_segments = 20
//! train_frac = 0.8
//! val_frac = 0.1
//! test_frac = 0.1
//! trials = 10
//! layer_sizes = [70, 50]
//! dropout_rate = 0.2
//! imv_seg_size = 8
//! svr_grid_search = true
//!
//! [train]
//! learning_rate = 0.005
//! epochs = 250
//! iterations_per_epoch = 10
//! beta1 = 0.9
//! beta2 = 0.999
//! adam_epsilon = 1e-8
//! gradient_clip_norm = 5.0       # omit to disable clipping
//!
//! [svr]
//! c = 10.0
//! epsilon = 0.1
//! kernel = "rbf"                 # or "linear"
//! # gamma = 0.333
//!
//! [eval]
//! threshold = 7.0
//!
//! [sweep]
//! grid = [[80], [70, 40], [70, 50], [80, 50]]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use sensoscore::data::{Informative, SynthConfig, CHANNEL_NAMES};
use sensoscore::error::{Error, Result};
use sensoscore::pipeline::PipelineConfig;
use sensoscore::svr::KernelChoice;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    scale_max: Option<f64>,
    #[serde(default)]
    synth: SynthSection,
    #[serde(default)]
    pipeline: PipelineSection,
    #[serde(default)]
    train: TrainSection,
    #[serde(default)]
    svr: SvrSection,
    #[serde(default)]
    eval: EvalSection,
    #[serde(default)]
    sweep: SweepSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SynthSection {
    cohort_size: Option<i64>,
    frames_per_session: Option<i64>,
    sample_period_ms: Option<i64>,
    label_noise: Option<f64>,
    informative: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PipelineSection {
    window_len: Option<i64>,
    num_segments: Option<i64>,
    train_frac: Option<f64>,
    val_frac: Option<f64>,
    test_frac: Option<f64>,
    trials: Option<i64>,
    layer_sizes: Option<Vec<i64>>,
    dropout_rate: Option<f64>,
    imv_seg_size: Option<i64>,
    svr_grid_search: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrainSection {
    learning_rate: Option<f64>,
    epochs: Option<i64>,
    iterations_per_epoch: Option<i64>,
    beta1: Option<f64>,
    beta2: Option<f64>,
    adam_epsilon: Option<f64>,
    gradient_clip_norm: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SvrSection {
    c: Option<f64>,
    epsilon: Option<f64>,
    kernel: Option<String>,
    gamma: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvalSection {
    threshold: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    grid: Option<Vec<Vec<i64>>>,
}

/// The fully resolved configuration a command runs under; this snapshot goes
/// into the run manifest verbatim.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub seed: u64,
    pub scale_max: f64,
    pub synth: SynthConfig,
    pub pipeline: PipelineConfig,
    pub sweep_grid: Vec<Vec<usize>>,
}

fn to_usize(field: &str, v: i64) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::invalid_config(field, format!("must be >= 0, got {v}")))
}

pub fn load(config_path: Option<&Path>, seed_flag: Option<u64>) -> Result<ResolvedConfig> {
    let file: FileConfig = match config_path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| Error::Io {
                path: p.to_path_buf(),
                source,
            })?;
            toml::from_str(&text)
                .map_err(|e| Error::invalid_config("config", e.to_string()))?
        }
        None => FileConfig::default(),
    };

    let seed = seed_flag.or(file.seed).unwrap_or(42);
    let scale_max = file.scale_max.unwrap_or(12.0);

    let mut synth = SynthConfig {
        scale_max,
        ..SynthConfig::default()
    };
    if let Some(v) = file.synth.cohort_size {
        synth.cohort_size = to_usize("synth.cohort_size", v)?;
    }
    if let Some(v) = file.synth.frames_per_session {
        synth.frames_per_session = to_usize("synth.frames_per_session", v)?;
    }
    if let Some(v) = file.synth.sample_period_ms {
        synth.sample_period_ms = u64::try_from(v)
            .map_err(|_| Error::invalid_config("synth.sample_period_ms", "must be >= 0"))?;
    }
    if let Some(v) = file.synth.label_noise {
        synth.label_noise = v;
    }
    if let Some(name) = &file.synth.informative {
        synth.informative = match name.as_str() {
            "all" | "all_channels" => Informative::AllChannels,
            other => {
                let idx = CHANNEL_NAMES.iter().position(|c| *c == other).ok_or_else(|| {
                    Error::invalid_config(
                        "synth.informative",
                        format!("`{other}` is neither `all` nor a channel name"),
                    )
                })?;
                Informative::SingleChannel(idx)
            }
        };
    }

    let mut pipeline = PipelineConfig {
        rng_seed: seed,
        ..PipelineConfig::default()
    };
    pipeline.eval.scale_max = scale_max;
    pipeline.svr.scale_max = scale_max;
    let p = &file.pipeline;
    if let Some(v) = p.window_len {
        pipeline.window_len = to_usize("pipeline.window_len", v)?;
    }
    if let Some(v) = p.num_segments {
        pipeline.num_segments = to_usize("pipeline.num_segments", v)?;
    }
    if let Some(v) = p.train_frac {
        pipeline.train_frac = v;
    }
    if let Some(v) = p.val_frac {
        pipeline.val_frac = v;
    }
    if let Some(v) = p.test_frac {
        pipeline.test_frac = v;
    }
    if let Some(v) = p.trials {
        pipeline.trials = to_usize("pipeline.trials", v)?;
    }
    if let Some(sizes) = &p.layer_sizes {
        pipeline.layer_sizes = sizes
            .iter()
            .map(|v| to_usize("pipeline.layer_sizes", *v))
            .collect::<Result<_>>()?;
    }
    if let Some(v) = p.dropout_rate {
        pipeline.dropout_rate = v;
    }
    if let Some(v) = p.imv_seg_size {
        pipeline.imv_seg_size = to_usize("pipeline.imv_seg_size", v)?;
    }
    if let Some(v) = p.svr_grid_search {
        pipeline.svr_grid_search = v;
    }

    let t = &file.train;
    if let Some(v) = t.learning_rate {
        pipeline.train.learning_rate = v;
    }
    if let Some(v) = t.epochs {
        pipeline.train.epochs = to_usize("train.epochs", v)?;
    }
    if let Some(v) = t.iterations_per_epoch {
        pipeline.train.iterations_per_epoch = to_usize("train.iterations_per_epoch", v)?;
    }
    if let Some(v) = t.beta1 {
        pipeline.train.beta1 = v;
    }
    if let Some(v) = t.beta2 {
        pipeline.train.beta2 = v;
    }
    if let Some(v) = t.adam_epsilon {
        pipeline.train.adam_epsilon = v;
    }
    if let Some(v) = t.gradient_clip_norm {
        pipeline.train.gradient_clip_norm = if v > 0.0 { Some(v) } else { None };
    }

    let s = &file.svr;
    if let Some(v) = s.c {
        pipeline.svr.c = v;
    }
    if let Some(v) = s.epsilon {
        pipeline.svr.epsilon = v;
    }
    if let Some(k) = &s.kernel {
        pipeline.svr.kernel = match k.as_str() {
            "rbf" => KernelChoice::Rbf,
            "linear" => KernelChoice::Linear,
            other => {
                return Err(Error::invalid_config(
                    "svr.kernel",
                    format!("`{other}` is not `rbf` or `linear`"),
                ))
            }
        };
    }
    pipeline.svr.gamma = s.gamma;

    if let Some(v) = file.eval.threshold {
        pipeline.eval.threshold = v;
    }

    let sweep_grid = match &file.sweep.grid {
        Some(grid) => grid
            .iter()
            .map(|arch| {
                arch.iter()
                    .map(|v| to_usize("sweep.grid", *v))
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<_>>()?,
        None => vec![vec![80], vec![70, 40], vec![70, 50], vec![80, 50]],
    };

    synth.validate()?;
    pipeline.validate()?;
    Ok(ResolvedConfig {
        seed,
        scale_max,
        synth,
        pipeline,
        sweep_grid,
    })
}
