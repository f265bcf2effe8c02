//! Single-pass streaming PCA.
//!
//! The estimators in [`algorithms`] consume a [`SampleStream`] one
//! mini-batch at a time and never revisit a block:
//!
//! * AdaOja, Oja's method with a per-column AdaGrad step size,
//! * Oja's method with a `c`, `c/t` or `c/√t` schedule,
//! * the streaming (block) power method,
//! * history PCA.
//!
//! [`data`] provides spiked-covariance, UCI bag-of-words and CIFAR-10
//! sources, [`metrics`] scores bases by explained variance against an
//! offline reference, and [`harness`] runs step-size sweeps and
//! algorithm comparisons that write CSV and a run manifest.
//!
//! ```
//! use streampca::{adaoja_run, explained_variance, gen_spiked, Dataset, RunConfig, SpikedModel};
//!
//! let model = SpikedModel::new(50, 2, 0.05, 1).unwrap();
//! let mut stream = gen_spiked(&model, 500, 10).unwrap();
//! let result = adaoja_run(&mut stream, &RunConfig::new(2, 10, 7)).unwrap();
//! let data = Dataset::Dense(model.materialize(500).unwrap());
//! let ev = explained_variance(&data, &result.final_basis).unwrap();
//! assert!(ev > 0.9);
//! ```

pub mod algorithms;
pub mod basis;
pub mod block;
pub mod data;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod par;
pub mod stream;

pub use algorithms::{
    adaoja_run, adaoja_run_with, hpca_run, init_basis, oja_run, run, spm_run, AdaOja, AdaOjaForm,
    Algorithm, Checkpoint, Estimator, HistoryPca, Oja, RunConfig, RunResult, Schedule,
    ScheduleKind, StreamingPower,
};
pub use basis::{normalize_vector, orthonormalize, Basis};
pub use block::{block_gradient, CsrMatrix, SampleBlock};
pub use data::{center, gen_spiked, load_cifar, parse_docword, BowDataset, Dataset, SpikedModel};
pub use error::{Error, Result};
pub use metrics::{eval_curve, explained_variance, offline_topk, EvCurve};
pub use par::Execution;
pub use stream::SampleStream;
