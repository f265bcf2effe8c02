//! Spiked covariance generator: `x = A0 · diag(w) · z + σ · ε`.
//!
//! Samples are drawn through the factor form, so the `d × d` covariance
//! `A0 diag(w)² A0ᵀ + σ² I` is never built on the sampling path.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::basis::orthonormalize;
use crate::block::SampleBlock;
use crate::error::{Error, Result};
use crate::stream::SampleStream;

/// ChaCha stream ids for one seed. Stream 0 is left to basis initialization, so a run
/// seeded like its data never starts on the planted spikes.
const MODEL_STREAM: u64 = 1;
const SAMPLE_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct SpikedModel {
    d: usize,
    k_true: usize,
    sigma: f64,
    seed: u64,
    a0: Array2<f64>,
    w: Array1<f64>,
}

impl SpikedModel {
    /// Draws `A0` (orthonormalized Gaussian) and `w ~ U(0,1)` sorted descending and
    /// scaled so `w[0] = 1`.
    pub fn new(d: usize, k_true: usize, sigma: f64, seed: u64) -> Result<Self> {
        if k_true == 0 || k_true > d {
            return Err(Error::InvalidArgument(format!(
                "spiked model needs 1 <= k_true <= d, got d={d} k_true={k_true}"
            )));
        }
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "sigma must be >= 0, got {sigma}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(MODEL_STREAM);
        let g = Array2::from_shape_simple_fn((d, k_true), || StandardNormal.sample(&mut rng));
        let a0 = orthonormalize(g.view())?.into_inner();

        let mut w: Vec<f64> = (0..k_true)
            .map(|_| loop {
                let u: f64 = rng.random();
                if u > 0.0 {
                    break u;
                }
            })
            .collect();
        w.sort_by(|a, b| b.total_cmp(a));
        let top = w[0];
        for v in w.iter_mut() {
            *v /= top;
        }
        w[0] = 1.0;

        Ok(SpikedModel {
            d,
            k_true,
            sigma,
            seed,
            a0,
            w: Array1::from(w),
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn k_true(&self) -> usize {
        self.k_true
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Planted orthonormal directions, `d × k_true`.
    pub fn spikes(&self) -> &Array2<f64> {
        &self.a0
    }

    pub fn weights(&self) -> &Array1<f64> {
        &self.w
    }

    /// `A0 diag(w)² A0ᵀ + σ² I`. Builds a `d × d` matrix; meant for small `d`.
    pub fn covariance(&self) -> Array2<f64> {
        let scaled = &self.a0 * &self.w.view().insert_axis(ndarray::Axis(0));
        let mut cov = scaled.dot(&scaled.t());
        for i in 0..self.d {
            cov[[i, i]] += self.sigma * self.sigma;
        }
        cov
    }

    /// All `n` samples as a dense matrix, identical to concatenating the stream's blocks.
    pub fn materialize(&self, n: usize) -> Result<Array2<f64>> {
        let mut stream = gen_spiked(self, n, n.max(1))?;
        Ok(stream
            .next_block()?
            .expect("n >= 1 yields one block")
            .to_dense())
    }
}

/// Seeded stream of `n` spiked-model samples in blocks of `batch`.
#[derive(Debug, Clone)]
pub struct SpikedStream {
    model: SpikedModel,
    rng: ChaCha8Rng,
    batch: usize,
    n: usize,
    emitted: usize,
}

pub fn gen_spiked(model: &SpikedModel, n: usize, batch: usize) -> Result<SpikedStream> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if batch == 0 {
        return Err(Error::InvalidArgument(
            "batch size must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    rng.set_stream(SAMPLE_STREAM);
    Ok(SpikedStream {
        model: model.clone(),
        rng,
        batch,
        n,
        emitted: 0,
    })
}

impl SampleStream for SpikedStream {
    fn dim(&self) -> usize {
        self.model.d
    }

    fn batch(&self) -> usize {
        self.batch
    }

    fn total(&self) -> Option<usize> {
        Some(self.n)
    }

    fn next_block(&mut self) -> Result<Option<SampleBlock>> {
        if self.emitted >= self.n {
            return Ok(None);
        }
        let rows = self.batch.min(self.n - self.emitted);
        let (d, k) = (self.model.d, self.model.k_true);
        let mut x = Array2::zeros((rows, d));
        let mut z = Array1::zeros(k);
        for mut row in x.rows_mut() {
            // Per-sample draw order is fixed (z then ε) so blocks of any size concatenate
            // to the same sample matrix.
            for (zi, wi) in z.iter_mut().zip(self.model.w.iter()) {
                let g: f64 = StandardNormal.sample(&mut self.rng);
                *zi = wi * g;
            }
            for v in row.iter_mut() {
                let e: f64 = StandardNormal.sample(&mut self.rng);
                *v = self.model.sigma * e;
            }
            row += &self.model.a0.dot(&z);
        }
        self.emitted += rows;
        SampleBlock::dense(x).map(Some)
    }
}
