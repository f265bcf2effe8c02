use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::output::{ensure_dir, sha256_file};
use super::{DatasetSpec, ExperimentSpec, RunRecord};
use crate::error::{Error, Result};

/// `<command>.manifest.json`, so a sweep and a comparison can share a directory.
pub fn manifest_path(dir: &Path, command: &str) -> PathBuf {
    dir.join(format!("{command}.manifest.json"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seeds {
    pub run: u64,
    pub data: Option<u64>,
}

/// Reproducibility record written next to every experiment's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub spec: ExperimentSpec,
    pub seeds: Seeds,
    pub runs: Vec<RunRecord>,
    pub outputs: Vec<OutputDigest>,
}

impl Manifest {
    pub fn build(
        spec: &ExperimentSpec,
        command: &str,
        runs: Vec<RunRecord>,
        outputs: &[impl AsRef<Path>],
    ) -> Result<Self> {
        let outputs = outputs
            .iter()
            .map(|p| {
                let p = p.as_ref();
                Ok(OutputDigest {
                    file: p
                        .file_name()
                        .map(|f| f.to_string_lossy().into_owned())
                        .unwrap_or_default(),
                    sha256: sha256_file(p)?,
                })
            })
            .collect::<Result<_>>()?;
        let data = match spec.dataset {
            DatasetSpec::Spiked { seed, .. } => Some(seed),
            _ => None,
        };
        Ok(Manifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            spec: spec.clone(),
            seeds: Seeds {
                run: spec.seed,
                data,
            },
            runs,
            outputs,
        })
    }

    pub fn digest(&self, file: &str) -> Option<&str> {
        self.outputs
            .iter()
            .find(|o| o.file == file)
            .map(|o| o.sha256.as_str())
    }
}

/// Builds the manifest for `outputs` and writes it next to them in `spec.out_dir`.
pub fn write_manifest(
    spec: &ExperimentSpec,
    command: &str,
    runs: Vec<RunRecord>,
    outputs: &[impl AsRef<Path>],
) -> Result<(PathBuf, Manifest)> {
    let manifest = Manifest::build(spec, command, runs, outputs)?;
    ensure_dir(&spec.out_dir)?;
    let path = manifest_path(&spec.out_dir, command);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok((path, manifest))
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}
