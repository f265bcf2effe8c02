use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algorithms::{Algorithm, RunConfig, ScheduleKind, DEFAULT_B0};
use crate::data::{center, load_cifar, read_docword, read_spca_file, Dataset, SpikedModel};
use crate::error::{Error, Result};

/// Where an experiment's samples come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DatasetSpec {
    Spiked {
        d: usize,
        k_true: usize,
        sigma: f64,
        n: usize,
        seed: u64,
    },
    /// UCI docword file, optionally only the first `doc_limit` documents.
    Docword {
        path: PathBuf,
        #[serde(default)]
        doc_limit: Option<usize>,
    },
    /// CIFAR-10 binary batches, concatenated in order.
    Cifar {
        paths: Vec<PathBuf>,
        #[serde(default = "yes")]
        center: bool,
    },
    /// A dense matrix in the SPCA binary container.
    Spca {
        path: PathBuf,
        #[serde(default)]
        center: bool,
    },
}

fn yes() -> bool {
    true
}

impl DatasetSpec {
    pub fn label(&self) -> String {
        match self {
            DatasetSpec::Spiked {
                d,
                k_true,
                sigma,
                n,
                seed,
            } => format!("spiked-d{d}-k{k_true}-s{sigma}-n{n}-seed{seed}"),
            DatasetSpec::Docword { path, .. } => file_label(path),
            DatasetSpec::Cifar { .. } => "cifar10".to_string(),
            DatasetSpec::Spca { path, .. } => file_label(path),
        }
    }

    fn paths(&self) -> Vec<&Path> {
        match self {
            DatasetSpec::Spiked { .. } => vec![],
            DatasetSpec::Docword { path, .. } | DatasetSpec::Spca { path, .. } => vec![path],
            DatasetSpec::Cifar { paths, .. } => paths.iter().map(PathBuf::as_path).collect(),
        }
    }

    /// Loads the full dataset into memory. Bag-of-words data stays sparse.
    pub fn load(&self) -> Result<Dataset> {
        match self {
            DatasetSpec::Spiked {
                d,
                k_true,
                sigma,
                n,
                seed,
            } => {
                let model = SpikedModel::new(*d, *k_true, *sigma, *seed)?;
                Ok(Dataset::Dense(model.materialize(*n)?))
            }
            DatasetSpec::Docword { path, doc_limit } => {
                Ok(Dataset::Sparse(read_docword(path, *doc_limit)?.counts))
            }
            DatasetSpec::Cifar { paths, center: c } => {
                let x = load_cifar(paths)?;
                Ok(Dataset::Dense(if *c { center(&x)?.0 } else { x }))
            }
            DatasetSpec::Spca { path, center: c } => {
                let x = read_spca_file(path)?;
                Ok(Dataset::Dense(if *c { center(&x)?.0 } else { x }))
            }
        }
    }
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Step-size scales `base^i` for `i` in `exp_min..=exp_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub base: f64,
    pub exp_min: i32,
    pub exp_max: i32,
    #[serde(default = "default_schedules")]
    pub schedules: Vec<ScheduleKind>,
}

fn default_schedules() -> Vec<ScheduleKind> {
    vec![ScheduleKind::InverseT, ScheduleKind::InverseSqrtT]
}

impl GridSpec {
    pub fn new(base: f64, exp_min: i32, exp_max: i32) -> Self {
        GridSpec {
            base,
            exp_min,
            exp_max,
            schedules: default_schedules(),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (self.exp_min..=self.exp_max)
            .map(|i| self.base.powi(i))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub name: String,
    pub dataset: DatasetSpec,
    /// Methods for `compare`. Ignored by `sweep`, which always runs Oja and AdaOja.
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    pub k: usize,
    pub batch: usize,
    #[serde(default = "default_b0")]
    pub b0: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_checkpoint_every")]
    pub checkpoint_every: usize,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    /// Also compute the offline top-k reference.
    #[serde(default = "yes")]
    pub offline: bool,
    /// Upper bound on concurrent runs; `None` lets the pool decide.
    #[serde(default)]
    pub workers: Option<usize>,
    pub out_dir: PathBuf,
}

fn default_algorithms() -> Vec<Algorithm> {
    vec![Algorithm::Adaoja, Algorithm::Hpca, Algorithm::Spm]
}

fn default_b0() -> f64 {
    DEFAULT_B0
}

fn default_checkpoint_every() -> usize {
    1
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            k: self.k,
            batch: self.batch,
            b0: self.b0,
            seed: self.seed,
            checkpoint_every: self.checkpoint_every,
        }
    }

    /// Sets the run seed and, for synthetic data, the data seed.
    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        if let DatasetSpec::Spiked { seed: s, .. } = &mut self.dataset {
            *s = seed;
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        self.run_config()
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        if let Some(w) = self.workers {
            if w == 0 {
                return bad("workers must be at least 1".into());
            }
        }
        if let Some(g) = &self.grid {
            if !g.base.is_finite() || g.base <= 0.0 {
                return bad(format!("grid base must be positive, got {}", g.base));
            }
            if g.exp_min > g.exp_max {
                return bad(format!(
                    "empty grid: exp_min {} > exp_max {}",
                    g.exp_min, g.exp_max
                ));
            }
            if g.schedules.is_empty() {
                return bad("grid lists no schedules".into());
            }
            if g.values().iter().any(|c| !c.is_finite() || *c <= 0.0) {
                return bad("grid produces a zero or non-finite step scale".into());
            }
        }
        match &self.dataset {
            DatasetSpec::Spiked {
                d,
                k_true,
                sigma,
                n,
                ..
            } => {
                if *k_true == 0 || k_true > d {
                    return bad(format!(
                        "spiked dataset needs 1 <= k_true <= d, got {k_true}, {d}"
                    ));
                }
                if sigma.is_nan() || *sigma < 0.0 {
                    return bad(format!("sigma must be >= 0, got {sigma}"));
                }
                if *n == 0 {
                    return bad("spiked dataset needs n >= 1".into());
                }
                if self.k > *d {
                    return bad(format!("k = {} exceeds d = {d}", self.k));
                }
            }
            DatasetSpec::Cifar { paths, .. } if paths.is_empty() => {
                return bad("cifar dataset lists no batch files".into());
            }
            _ => {}
        }
        for p in self.dataset.paths() {
            if !p.exists() {
                return bad(format!("dataset file {} does not exist", p.display()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spiked() -> ExperimentSpec {
        ExperimentSpec {
            name: "t".into(),
            dataset: DatasetSpec::Spiked {
                d: 20,
                k_true: 2,
                sigma: 0.1,
                n: 100,
                seed: 1,
            },
            algorithms: default_algorithms(),
            k: 2,
            batch: 10,
            b0: DEFAULT_B0,
            seed: 0,
            checkpoint_every: 1,
            grid: Some(GridSpec::new(5.0, -1, 1)),
            offline: true,
            workers: None,
            out_dir: "out".into(),
        }
    }

    #[test]
    fn grid_values() {
        assert_eq!(GridSpec::new(2.0, -1, 2).values(), vec![0.5, 1.0, 2.0, 4.0]);
    }

    #[test]
    fn validation() {
        assert!(spiked().validate().is_ok());
        let mut s = spiked();
        s.grid = Some(GridSpec::new(5.0, 2, 1));
        assert!(matches!(s.validate(), Err(Error::Config(_))));
        let mut s = spiked();
        s.k = 0;
        assert!(s.validate().is_err());
        let mut s = spiked();
        s.dataset = DatasetSpec::Docword {
            path: "/definitely/not/here.txt".into(),
            doc_limit: None,
        };
        assert!(s
            .validate()
            .unwrap_err()
            .to_string()
            .contains("does not exist"));
    }

    #[test]
    fn json_defaults() {
        let s = ExperimentSpec::from_json(
            r#"{"dataset":{"kind":"spiked","d":10,"k_true":1,"sigma":0.5,"n":50,"seed":3},
                "k":1,"batch":10,"out_dir":"o"}"#,
        )
        .unwrap();
        assert_eq!(s.b0, 1e-5);
        assert!(s.offline);
        assert_eq!(s.algorithms.len(), 3);
        assert_eq!(ExperimentSpec::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn oja_algorithm_json() {
        let algs: Vec<Algorithm> = serde_json::from_str(
            r#"[{"name":"adaoja"},{"name":"oja","schedule":{"kind":"inverse-sqrt-t","c":2.0}}]"#,
        )
        .unwrap();
        assert_eq!(algs[1].label(), "oja");
    }
}
