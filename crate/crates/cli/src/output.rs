//! Output files and the run manifest.
//!
//! Artifacts are rendered in memory, written to the output directory, and
//! hashed; the manifest lists every file with its SHA-256 so a rerun with
//! the echoed config can be checked byte for byte.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST_NAME: &str = "manifest.json";

pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn json(name: &str, value: &Value) -> Self {
        let mut bytes = serde_json::to_vec_pretty(value).expect("JSON values serialize");
        bytes.push(b'\n');
        Artifact {
            name: name.to_string(),
            bytes,
        }
    }

    /// Comma-separated, header row from the record's field names.
    pub fn csv<R: Serialize>(name: &str, records: &[R]) -> Result<Self, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in records {
            w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        Ok(Artifact {
            name: name.to_string(),
            bytes,
        })
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(&self.bytes))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OutputDigest {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// The config after flag overrides and defaults.
    pub config: Value,
    pub seeds: Vec<u64>,
    pub workers: usize,
    pub started: String,
    pub finished: String,
    pub wall_seconds: f64,
    pub outputs: Vec<OutputDigest>,
}

/// Writes the artifacts into `dir` and returns their digests.
pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<OutputDigest>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    artifacts
        .iter()
        .map(|a| {
            let path: PathBuf = dir.join(&a.name);
            std::fs::write(&path, &a.bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Ok(OutputDigest {
                file: a.name.clone(),
                bytes: a.bytes.len(),
                sha256: a.sha256(),
            })
        })
        .collect()
}

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    let value = serde_json::to_value(manifest).expect("manifest serializes");
    let a = Artifact::json(MANIFEST_NAME, &value);
    let path = dir.join(MANIFEST_NAME);
    std::fs::write(&path, &a.bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        beta: f64,
        label: &'static str,
    }

    #[test]
    fn csv_has_header_and_dot_decimals() {
        let a = Artifact::csv(
            "t.csv",
            &[
                Row { beta: 0.5, label: "x" },
                Row {
                    beta: 1e-7,
                    label: "y,z",
                },
            ],
        )
        .unwrap();
        let text = String::from_utf8(a.bytes).unwrap();
        assert_eq!(text, "beta,label\n0.5,x\n1e-7,\"y,z\"\n");
    }

    #[test]
    fn digest_is_sha256() {
        let a = Artifact {
            name: "x".into(),
            bytes: b"abc".to_vec(),
        };
        assert_eq!(
            a.sha256(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
