//! Run manifests: every command writes one `run_manifest.json` next to its
//! outputs, recording the command, the resolved configuration, the seed, the
//! inputs and outputs, checksums of every artifact, and the wall-clock
//! duration. Everything except `duration_ms` is reproducible byte-for-byte.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use sensoscore::data::write_atomic;
use sensoscore::error::{Error, Result};

use crate::config::ResolvedConfig;

#[derive(Debug, Serialize)]
struct ArtifactRecord {
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    seed: u64,
    config: &'a ResolvedConfig,
    inputs: Vec<String>,
    outputs: Vec<ArtifactRecord>,
    duration_ms: u64,
}

pub struct RunRecorder {
    command: &'static str,
    started: Instant,
    inputs: Vec<String>,
    outputs: Vec<PathBuf>,
}

impl RunRecorder {
    pub fn new(command: &'static str) -> Self {
        RunRecorder {
            command,
            started: Instant::now(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.display().to_string());
    }

    pub fn output(&mut self, path: PathBuf) {
        self.outputs.push(path);
    }

    /// Writes an artifact atomically and records it.
    pub fn write(&mut self, path: PathBuf, contents: &str) -> Result<()> {
        write_atomic(&path, contents)?;
        self.outputs.push(path);
        Ok(())
    }

    /// Checksums all recorded outputs and writes `run_manifest.json` in
    /// `out_dir`.
    pub fn finish(self, out_dir: &Path, config: &ResolvedConfig) -> Result<PathBuf> {
        let mut outputs = Vec::with_capacity(self.outputs.len());
        for path in &self.outputs {
            let bytes = std::fs::read(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            let name = path
                .strip_prefix(out_dir)
                .unwrap_or(path)
                .display()
                .to_string();
            outputs.push(ArtifactRecord {
                path: name,
                sha256: hex::encode(Sha256::digest(&bytes)),
            });
        }
        let manifest = RunManifest {
            command: self.command,
            seed: config.seed,
            config,
            inputs: self.inputs,
            outputs,
            duration_ms: self.started.elapsed().as_millis() as u64,
        };
        let path = out_dir.join("run_manifest.json");
        write_atomic(
            &path,
            &serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
        )?;
        Ok(path)
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}
