//! Experiment orchestration: step-size sweeps, algorithm comparisons and
//! the files they leave behind.
//!
//! Every run in an experiment reads the same in-memory dataset through a
//! fresh [`Dataset::stream`](crate::data::Dataset::stream), so all runs see
//! the same block sequence. Each run records a digest of what it consumed and
//! the harness refuses to report results if those digests disagree.

mod compare;
mod manifest;
mod output;
mod presets;
mod spec;
mod sweep;

pub use compare::{run_compare, write_compare_csv, CompareResult, COMPARE_FILE, COMPARE_HEADER};
pub use manifest::{manifest_path, read_manifest, write_manifest, Manifest, OutputDigest, Seeds};
pub use output::{format_f64, sha256_file};
pub use presets::{preset, PRESET_NAMES};
pub use spec::{DatasetSpec, ExperimentSpec, GridSpec};
pub use sweep::{run_sweep, write_sweep_csv, SweepResult, SweepRow, SWEEP_FILE, SWEEP_HEADER};

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algorithms::{Algorithm, RunConfig, RunResult};
use crate::basis::Basis;
use crate::data::{write_spca_file, Dataset, SpikedModel};
use crate::error::{Error, Result};
use crate::metrics::{explained_variance, offline_topk};

/// What happened to one streaming run, as recorded in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub label: String,
    /// `ok` or `error: <message>`.
    pub status: String,
    pub wall_seconds: f64,
    pub stream_digest: Option<String>,
    pub blocks: usize,
    pub samples: usize,
}

impl RunRecord {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

pub(crate) fn status_of(err: &Error) -> String {
    output::sanitize(&format!("error: {err}"))
}

/// Runs one algorithm over a fresh pass of `data`, timing it.
pub(crate) fn timed_run(
    data: &Dataset,
    alg: &Algorithm,
    cfg: &RunConfig,
    label: String,
) -> (RunRecord, Result<RunResult>) {
    let start = Instant::now();
    let result = data
        .stream(cfg.batch)
        .and_then(|mut s| alg.run(&mut s, cfg));
    let wall_seconds = start.elapsed().as_secs_f64();
    let record = match &result {
        Ok(r) => RunRecord {
            label,
            status: "ok".into(),
            wall_seconds,
            stream_digest: Some(r.stream_digest.clone()),
            blocks: r.blocks,
            samples: r.samples,
        },
        Err(e) => RunRecord {
            label,
            status: status_of(e),
            wall_seconds,
            stream_digest: None,
            blocks: 0,
            samples: 0,
        },
    };
    (record, result)
}

/// Every successful run must have consumed the same block sequence.
pub(crate) fn check_digests(runs: &[RunRecord]) -> Result<()> {
    let mut digests = runs.iter().filter_map(|r| r.stream_digest.as_deref());
    if let Some(first) = digests.next() {
        if let Some(other) = digests.find(|d| *d != first) {
            return Err(Error::Format(format!(
                "runs consumed different block sequences ({first} vs {other})"
            )));
        }
    }
    Ok(())
}

/// Loads and validates everything an experiment needs before any run starts.
pub(crate) fn prepare(spec: &ExperimentSpec) -> Result<Dataset> {
    spec.validate()?;
    let data = spec.dataset.load()?;
    if spec.k > data.dim() {
        return Err(Error::Config(format!(
            "k = {} exceeds data dimension {}",
            spec.k,
            data.dim()
        )));
    }
    Ok(data)
}

pub(crate) fn offline_ev(data: &Dataset, k: usize) -> Result<f64> {
    explained_variance(data, &offline_topk(data, k)?)
}

pub const OFFLINE_EV_FILE: &str = "offline_ev.csv";
pub const OFFLINE_EV_HEADER: &str = "k,ev";
pub const SPIKED_FILE: &str = "spiked.spca";

/// Explained variance of the offline top-`j` subspace for `j = 1..=k`.
pub fn offline_ev_table(data: &Dataset, k: usize) -> Result<Vec<(usize, f64)>> {
    let top = offline_topk(data, k)?;
    (1..=k)
        .map(|j| {
            let sub =
                Basis::from_orthonormal(top.columns().slice(ndarray::s![.., ..j]).to_owned())?;
            Ok((j, explained_variance(data, &sub)?))
        })
        .collect()
}

/// Writes `offline_ev.csv` and a manifest into `spec.out_dir`.
pub fn run_offline_ev(spec: &ExperimentSpec, command: &str) -> Result<Vec<(usize, f64)>> {
    let data = prepare(spec)?;
    let table = offline_ev_table(&data, spec.k)?;
    let mut text = format!("{OFFLINE_EV_HEADER}\n");
    for (k, ev) in &table {
        text.push_str(&format!("{k},{}\n", format_f64(*ev)));
    }
    let path = output::write_output(&spec.out_dir, OFFLINE_EV_FILE, &text)?;
    write_manifest(spec, command, Vec::new(), &[&path])?;
    Ok(table)
}

/// Materializes a spiked dataset to `spiked.spca` in `spec.out_dir`.
pub fn run_gen_spiked(spec: &ExperimentSpec, command: &str) -> Result<PathBuf> {
    spec.validate()?;
    let DatasetSpec::Spiked {
        d,
        k_true,
        sigma,
        n,
        seed,
    } = spec.dataset
    else {
        return Err(Error::Config("gen-spiked needs a spiked dataset".into()));
    };
    let x = SpikedModel::new(d, k_true, sigma, seed)?.materialize(n)?;
    output::ensure_dir(&spec.out_dir)?;
    let path = spec.out_dir.join(SPIKED_FILE);
    write_spca_file(&path, &x)?;
    write_manifest(spec, command, Vec::new(), &[&path])?;
    Ok(path)
}
