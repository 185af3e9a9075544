//! Provenance sidecars written next to every generated dataset.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::io::{self, IoError};

/// Operation that produced a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    IngestMono,
    IngestParallel,
    AllMono,
    MonoParallelConcat,
    MonoParallelSeparate,
    MtDataset,
    GeneralPassthrough,
    SftMixture,
    Xqa,
    Evaluation,
    Stats,
    Report,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub strategy: Strategy,
    pub seed: u64,
    /// Number of records (lines) in the emitted dataset file.
    pub record_count: u64,
    pub created_from: Vec<InputDigest>,
    pub config_digest: String,
    /// Effective configuration that produced the dataset.
    pub config: serde_json::Value,
    #[serde(default)]
    pub counts: BTreeMap<String, u64>,
    #[serde(default)]
    pub skipped: BTreeMap<String, u64>,
    #[serde(default)]
    pub warnings: Vec<String>,
    /// Free-form contracts for downstream consumers (record formats etc).
    #[serde(default)]
    pub notes: BTreeMap<String, String>,
}

impl DatasetManifest {
    pub fn new<C: Serialize>(strategy: Strategy, seed: u64, config: &C) -> Self {
        let config = serde_json::to_value(config).expect("config serialization cannot fail");
        let mut m = DatasetManifest {
            strategy,
            seed,
            record_count: 0,
            created_from: Vec::new(),
            config_digest: String::new(),
            config: serde_json::Value::Null,
            counts: BTreeMap::new(),
            skipped: BTreeMap::new(),
            warnings: Vec::new(),
            notes: BTreeMap::new(),
        };
        m.set_config(config);
        m
    }

    /// Replaces the embedded configuration and recomputes its digest.
    pub fn set_config(&mut self, config: serde_json::Value) {
        let canonical = serde_json::to_vec(&config).expect("value serialization cannot fail");
        self.config_digest = io::sha256_hex(&canonical);
        self.config = config;
    }

    pub fn add_input(&mut self, path: &Path) -> Result<(), IoError> {
        let sha256 = io::file_sha256(path)?;
        self.created_from.push(InputDigest {
            path: path.display().to_string(),
            sha256,
        });
        Ok(())
    }

    pub fn bump(&mut self, key: impl Into<String>, by: u64) {
        *self.counts.entry(key.into()).or_insert(0) += by;
    }

    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("manifest serialization cannot fail");
        out.push(b'\n');
        out
    }

    pub fn sidecar_path(output: &Path) -> PathBuf {
        let mut name = output.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        output.with_file_name(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_digest_tracks_config() {
        let a = DatasetManifest::new(Strategy::AllMono, 1, &serde_json::json!({"tau": 30}));
        let b = DatasetManifest::new(Strategy::AllMono, 1, &serde_json::json!({"tau": 30}));
        let c = DatasetManifest::new(Strategy::AllMono, 1, &serde_json::json!({"tau": 80}));
        assert_eq!(a.config_digest, b.config_digest);
        assert_ne!(a.config_digest, c.config_digest);
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(
            DatasetManifest::sidecar_path(Path::new("out/cpt.jsonl")),
            PathBuf::from("out/cpt.jsonl.manifest.json")
        );
    }
}
