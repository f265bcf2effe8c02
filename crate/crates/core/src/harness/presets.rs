//! Named experiment configurations.
//!
//! `desk-*` presets are small enough for CI. `full-spiked-*` run the spiked
//! model at d=1000, n=10000; the text and image presets expect the UCI and
//! CIFAR-10 files under `data/`. Where the grid or batch size for a corpus is
//! ambiguous, both variants are shipped.

use std::path::PathBuf;

use super::spec::{DatasetSpec, ExperimentSpec, GridSpec};
use crate::algorithms::{Algorithm, DEFAULT_B0};

fn base(
    name: &str,
    dataset: DatasetSpec,
    k: usize,
    batch: usize,
    grid: GridSpec,
) -> ExperimentSpec {
    ExperimentSpec {
        name: name.to_string(),
        dataset,
        algorithms: vec![Algorithm::Adaoja, Algorithm::Hpca, Algorithm::Spm],
        k,
        batch,
        b0: DEFAULT_B0,
        seed: 0,
        checkpoint_every: 1,
        grid: Some(grid),
        offline: true,
        workers: None,
        out_dir: PathBuf::from("out").join(name),
    }
}

fn spiked(d: usize, k: usize, sigma: f64, n: usize) -> DatasetSpec {
    DatasetSpec::Spiked {
        d,
        k_true: k,
        sigma,
        n,
        seed: 0,
    }
}

fn docword(file: &str, doc_limit: Option<usize>) -> DatasetSpec {
    DatasetSpec::Docword {
        path: PathBuf::from("data").join(file),
        doc_limit,
    }
}

pub const PRESET_NAMES: &[&str] = &[
    "desk-spiked-low",
    "desk-spiked-high",
    "full-spiked-low",
    "full-spiked-high",
    "kos",
    "kos-text-grid",
    "nips",
    "nips-text-grid",
    "enron",
    "enron-text-grid",
    "nytimes",
    "nytimes-b10",
    "pubmed",
    "pubmed-b10",
    "cifar",
];

pub fn preset(name: &str) -> Option<ExperimentSpec> {
    let spiked_grid = || GridSpec::new(5.0, -5, 10);
    let caption_grid = || GridSpec::new(2.0, -5, 15);
    let text_grid = || GridSpec::new(2.0, -10, 10);
    let spec = match name {
        "desk-spiked-low" => base(name, spiked(200, 5, 0.01, 2000), 5, 10, spiked_grid()),
        "desk-spiked-high" => base(name, spiked(200, 5, 0.75, 2000), 5, 10, spiked_grid()),
        "full-spiked-low" => base(name, spiked(1000, 5, 0.01, 10_000), 5, 10, spiked_grid()),
        "full-spiked-high" => base(name, spiked(1000, 5, 0.75, 10_000), 5, 10, spiked_grid()),
        "kos" => base(
            name,
            docword("docword.kos.txt", None),
            10,
            10,
            caption_grid(),
        ),
        "kos-text-grid" => base(name, docword("docword.kos.txt", None), 10, 10, text_grid()),
        "nips" => base(
            name,
            docword("docword.nips.txt", None),
            10,
            10,
            caption_grid(),
        ),
        "nips-text-grid" => base(name, docword("docword.nips.txt", None), 10, 10, text_grid()),
        "enron" => base(
            name,
            docword("docword.enron.txt", None),
            10,
            10,
            caption_grid(),
        ),
        "enron-text-grid" => base(
            name,
            docword("docword.enron.txt", None),
            10,
            10,
            text_grid(),
        ),
        "nytimes" | "nytimes-b10" => {
            let batch = if name == "nytimes" { 100 } else { 10 };
            let mut s = base(
                name,
                docword("docword.nytimes.txt", Some(100_000)),
                10,
                batch,
                text_grid(),
            );
            s.offline = false;
            s
        }
        "pubmed" | "pubmed-b10" => {
            let batch = if name == "pubmed" { 100 } else { 10 };
            let mut s = base(
                name,
                docword("docword.pubmed.txt", Some(300_000)),
                10,
                batch,
                caption_grid(),
            );
            s.offline = false;
            s
        }
        "cifar" => base(
            name,
            DatasetSpec::Cifar {
                paths: (1..=5)
                    .map(|i| {
                        PathBuf::from("data/cifar-10-batches-bin")
                            .join(format!("data_batch_{i}.bin"))
                    })
                    .collect(),
                center: true,
            },
            10,
            10,
            GridSpec::new(5.0, -15, 5),
        ),
        _ => return None,
    };
    Some(spec)
}
