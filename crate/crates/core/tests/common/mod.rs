#![allow(dead_code)]

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use streampca::{CsrMatrix, SampleBlock, SampleStream};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
    let mut r = rng(seed);
    Array2::from_shape_simple_fn((rows, cols), || StandardNormal.sample(&mut r))
}

/// Dense matrix with roughly `density` of its entries nonzero.
pub fn sparse_like(rows: usize, cols: usize, density: f64, seed: u64) -> Array2<f64> {
    let mut r = rng(seed);
    Array2::from_shape_simple_fn((rows, cols), || {
        if r.random::<f64>() < density {
            StandardNormal.sample(&mut r)
        } else {
            0.0
        }
    })
}

pub fn rel_err(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    let diff = (a - b).mapv(|x| x * x).sum().sqrt();
    let scale = b.mapv(|x| x * x).sum().sqrt();
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Wraps a stream and counts pulls, failing loudly on a pull after the end.
pub struct Counting<S> {
    pub inner: S,
    pub blocks: usize,
    pub pulls: usize,
    pub ended: bool,
}

impl<S> Counting<S> {
    pub fn new(inner: S) -> Self {
        Counting {
            inner,
            blocks: 0,
            pulls: 0,
            ended: false,
        }
    }
}

impl<S: SampleStream> SampleStream for Counting<S> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn batch(&self) -> usize {
        self.inner.batch()
    }

    fn total(&self) -> Option<usize> {
        self.inner.total()
    }

    fn next_block(&mut self) -> streampca::Result<Option<SampleBlock>> {
        assert!(!self.ended, "block pulled after end of stream");
        self.pulls += 1;
        let b = self.inner.next_block()?;
        match b {
            Some(_) => self.blocks += 1,
            None => self.ended = true,
        }
        Ok(b)
    }
}

pub fn csr(x: &Array2<f64>) -> CsrMatrix {
    CsrMatrix::from_dense(x.view())
}
