//! Explained variance and the offline top-k reference subspace.
//!
//! Evaluation may read the data as often as it needs; only the streaming
//! estimators are held to a single pass.

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{s, Array1, Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::algorithms::RunResult;
use crate::basis::{orthonormalize, Basis};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::par::{map_ordered, Execution};

/// Rows per evaluation chunk.
const EV_CHUNK: usize = 1024;

/// Largest `d` for which [`offline_topk`] forms the `d × d` covariance.
pub const DENSE_EIGEN_MAX_DIM: usize = 4000;

/// Stop orthogonal iteration once the top-k subspace moves less than this.
pub const SUBSPACE_TOL: f64 = 1e-10;
const MAX_SUBSPACE_ITERS: usize = 20_000;

/// Eigenvalues at or below this fraction of the largest count as zero.
const EIG_RANK_TOL: f64 = 1e-12;

fn chunk_sums(data: &Dataset, w: ArrayView2<f64>, start: usize, end: usize) -> (f64, f64) {
    match data {
        Dataset::Dense(x) => {
            let xc = x.slice(s![start..end, ..]);
            let xw = xc.dot(&w);
            (
                xw.iter().map(|v| v * v).sum(),
                xc.iter().map(|v| v * v).sum(),
            )
        }
        Dataset::Sparse(x) => {
            let k = w.ncols();
            let mut proj = vec![0.0; k];
            let (mut num, mut den) = (0.0, 0.0);
            for r in start..end {
                proj.iter_mut().for_each(|p| *p = 0.0);
                let (idx, val) = x.row(r);
                for (&j, &v) in idx.iter().zip(val) {
                    den += v * v;
                    for (p, wj) in proj.iter_mut().zip(w.row(j)) {
                        *p += v * wj;
                    }
                }
                num += proj.iter().map(|p| p * p).sum::<f64>();
            }
            (num, den)
        }
    }
}

/// `‖X W‖_F² / ‖X‖_F²`, evaluated in row chunks.
pub fn explained_variance(data: &Dataset, basis: &Basis) -> Result<f64> {
    explained_variance_with(data, basis, Execution::default())
}

pub fn explained_variance_with(data: &Dataset, basis: &Basis, exec: Execution) -> Result<f64> {
    if basis.dim() != data.dim() {
        return Err(Error::DimensionMismatch(format!(
            "data dim {}, basis dim {}",
            data.dim(),
            basis.dim()
        )));
    }
    let n = data.rows();
    let bounds: Vec<(usize, usize)> = (0..n)
        .step_by(EV_CHUNK)
        .map(|s| (s, (s + EV_CHUNK).min(n)))
        .collect();
    let parts = map_ordered(exec, None, &bounds, |&(s, e)| {
        chunk_sums(data, basis.columns(), s, e)
    });
    let (num, den) = parts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    if den == 0.0 {
        return Err(Error::Degenerate("dataset has zero Frobenius norm".into()));
    }
    // Rounding can push a full-space projection a hair above 1.
    Ok((num / den).clamp(0.0, 1.0))
}

/// `(1/n) XᵀX` as a dense `d × d` matrix.
pub fn sample_covariance(data: &Dataset) -> Array2<f64> {
    let n = data.rows() as f64;
    let mut c = match data {
        Dataset::Dense(x) => x.t().dot(x),
        Dataset::Sparse(x) => {
            let d = x.cols();
            let mut c = Array2::zeros((d, d));
            for r in 0..x.rows() {
                let (idx, val) = x.row(r);
                for (&i, &a) in idx.iter().zip(val) {
                    for (&j, &b) in idx.iter().zip(val) {
                        c[[i, j]] += a * b;
                    }
                }
            }
            c
        }
    };
    c /= n;
    c
}

/// Eigenpairs of a symmetric matrix sorted by descending eigenvalue.
fn sorted_eigen(c: &Array2<f64>) -> (Array1<f64>, Array2<f64>) {
    let d = c.nrows();
    let m = DMatrix::from_fn(d, d, |i, j| c[[i, j]]);
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Array2::from_shape_fn((d, d), |(r, c)| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues of the sample covariance, descending. Dense; small `d` only.
pub fn covariance_spectrum(data: &Dataset) -> Array1<f64> {
    sorted_eigen(&sample_covariance(data)).0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OfflineMethod {
    /// Dense eigensolver up to [`DENSE_EIGEN_MAX_DIM`], orthogonal iteration beyond.
    #[default]
    Auto,
    Dense,
    OrthogonalIteration,
}

fn check_rank(values: &[f64], k: usize) -> Result<()> {
    let top = values.first().copied().unwrap_or(0.0);
    if top.is_nan() || top <= 0.0 {
        return Err(Error::Degenerate("sample covariance is zero".into()));
    }
    let threshold = EIG_RANK_TOL * top;
    match values.get(k - 1) {
        Some(&v) if v > threshold => Ok(()),
        other => Err(Error::RankDeficient {
            column: k - 1,
            diag: other.copied().unwrap_or(0.0),
            threshold,
        }),
    }
}

/// Top-`k` eigenvectors of `(1/n) XᵀX`.
pub fn offline_topk(data: &Dataset, k: usize) -> Result<Basis> {
    offline_topk_with(data, k, OfflineMethod::Auto)
}

pub fn offline_topk_with(data: &Dataset, k: usize, method: OfflineMethod) -> Result<Basis> {
    let d = data.dim();
    if k == 0 || k > d {
        return Err(Error::InvalidArgument(format!(
            "offline_topk needs 1 <= k <= d, got d={d} k={k}"
        )));
    }
    let dense = match method {
        OfflineMethod::Auto => d <= DENSE_EIGEN_MAX_DIM,
        OfflineMethod::Dense => true,
        OfflineMethod::OrthogonalIteration => false,
    };
    if dense {
        let (values, vectors) = sorted_eigen(&sample_covariance(data));
        check_rank(values.as_slice().unwrap(), k)?;
        orthonormalize(vectors.slice(s![.., ..k]))
    } else {
        orthogonal_iteration(data, k)
    }
}

/// `(1/n) Xᵀ (X V)` without forming `XᵀX`.
fn covariance_apply(data: &Dataset, v: ArrayView2<f64>) -> Array2<f64> {
    let n = data.rows() as f64;
    let mut out = match data {
        Dataset::Dense(x) => x.t().dot(&x.dot(&v)),
        Dataset::Sparse(x) => x.transpose_mul_dense(x.mul_dense(v).view()),
    };
    out /= n;
    out
}

/// Block orthogonal iteration with Rayleigh–Ritz, block size oversampled past `k`.
fn orthogonal_iteration(data: &Dataset, k: usize) -> Result<Basis> {
    let d = data.dim();
    let mut width = (2 * k).max(k + 10).min(d).min(data.rows());
    if width < k {
        return Err(Error::RankDeficient {
            column: width,
            diag: 0.0,
            threshold: 0.0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let start = Array2::from_shape_simple_fn((d, width), || StandardNormal.sample(&mut rng));
    let mut v = orthonormalize(start.view())?.into_inner();
    let mut prev: Option<Array2<f64>> = None;

    for _ in 0..MAX_SUBSPACE_ITERS {
        let y = covariance_apply(data, v.view());
        let q = match orthonormalize(y.view()) {
            Ok(q) => q.into_inner(),
            Err(Error::RankDeficient { column, .. }) if column >= k => {
                // Data rank is below the block width; shrink and carry on.
                width = column;
                v = v.slice(s![.., ..width]).to_owned();
                prev = None;
                continue;
            }
            Err(e) => return Err(e),
        };
        // Rayleigh–Ritz on span(q).
        let cq = covariance_apply(data, q.view());
        let mut t = q.t().dot(&cq);
        let tt = t.t().to_owned();
        t = (&t + &tt) * 0.5;
        let (values, rot) = sorted_eigen(&t);
        check_rank(values.as_slice().unwrap(), k)?;
        v = q.dot(&rot);

        let top = v.slice(s![.., ..k]).to_owned();
        if let Some(p) = prev.as_ref() {
            let resid = &top - &p.dot(&p.t().dot(&top));
            let change = resid.iter().map(|x| x * x).sum::<f64>().sqrt();
            if change < SUBSPACE_TOL {
                return orthonormalize(top.view());
            }
        }
        prev = Some(top);
    }
    Err(Error::Degenerate(format!(
        "orthogonal iteration did not reach subspace change < {SUBSPACE_TOL:e} in {MAX_SUBSPACE_ITERS} iterations"
    )))
}

/// Explained variance at every checkpoint of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvCurve {
    pub dataset: String,
    pub algorithm: String,
    /// `(samples_seen, ev)` in checkpoint order.
    pub points: Vec<(usize, f64)>,
}

impl EvCurve {
    pub fn final_ev(&self) -> Option<f64> {
        self.points.last().map(|p| p.1)
    }
}

/// Each checkpoint is scored against the full dataset, not the prefix seen so far.
pub fn eval_curve(data: &Dataset, result: &RunResult, label: &str) -> Result<EvCurve> {
    eval_curve_with(data, result, label, Execution::default())
}

pub fn eval_curve_with(
    data: &Dataset,
    result: &RunResult,
    label: &str,
    exec: Execution,
) -> Result<EvCurve> {
    let evs = map_ordered(exec, None, &result.checkpoints, |cp| {
        explained_variance_with(data, &cp.basis, Execution::Sequential)
            .map(|ev| (cp.samples_seen, ev))
    });
    Ok(EvCurve {
        dataset: label.to_string(),
        algorithm: result.algorithm.clone(),
        points: evs.into_iter().collect::<Result<_>>()?,
    })
}
