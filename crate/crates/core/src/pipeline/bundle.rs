//! The versioned model bundle: one JSON document holding the LSTM, the SVR,
//! the normalization statistics, and the configuration they were trained
//! under. Parameters round-trip bit-exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use super::train::TrainedModels;
use crate::data::{write_atomic, ChannelStats};
use crate::error::{Error, Result};
use crate::lstm::LstmModel;
use crate::svr::SvrModel;

pub const BUNDLE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub format_version: u32,
    pub lstm: LstmModel,
    pub svr: SvrModel,
    pub stats: ChannelStats,
    pub config: PipelineConfig,
}

impl ModelBundle {
    pub fn new(models: &TrainedModels, config: &PipelineConfig) -> Self {
        ModelBundle {
            format_version: BUNDLE_VERSION,
            lstm: models.lstm.clone(),
            svr: models.svr.clone(),
            stats: models.stats.clone(),
            config: config.clone(),
        }
    }

    pub fn models(&self) -> TrainedModels {
        TrainedModels {
            lstm: self.lstm.clone(),
            svr: self.svr.clone(),
            stats: self.stats.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let bundle: ModelBundle =
            serde_json::from_str(json).map_err(|e| Error::Bundle(e.to_string()))?;
        if bundle.format_version != BUNDLE_VERSION {
            return Err(Error::BundleVersion {
                found: bundle.format_version,
                expected: BUNDLE_VERSION,
            });
        }
        bundle.lstm.validate()?;
        if bundle.svr.support_vectors.len() != bundle.svr.dual_coefs.len() {
            return Err(Error::Bundle(
                "support vector / dual coefficient count mismatch".into(),
            ));
        }
        Ok(bundle)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_json())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&json)
    }
}
