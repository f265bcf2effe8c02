//! Data sources exposed as [`SampleStream`]s, plus the in-memory [`Dataset`]
//! used for evaluation.

mod center;
mod cifar;
mod container;
mod docword;
mod spiked;

pub use center::{center, CenteringStats};
pub use cifar::{load_cifar, parse_cifar, CIFAR_PIXELS, CIFAR_RECORD};
pub use container::{
    read_spca, read_spca_file, write_spca, write_spca_file, SPCA_MAGIC, SPCA_VERSION,
};
pub use docword::{parse_docword, read_docword, write_docword, BowDataset};
pub use spiked::{gen_spiked, SpikedModel, SpikedStream};

use ndarray::{s, Array2};

use crate::block::{CsrMatrix, SampleBlock};
use crate::error::{Error, Result};
use crate::stream::SampleStream;

/// A full `n × d` data matrix, dense or CSR.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Dense(Array2<f64>),
    Sparse(CsrMatrix),
}

impl Dataset {
    pub fn rows(&self) -> usize {
        match self {
            Dataset::Dense(x) => x.nrows(),
            Dataset::Sparse(x) => x.rows(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Dataset::Dense(x) => x.ncols(),
            Dataset::Sparse(x) => x.cols(),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, Dataset::Sparse(_))
    }

    /// Rows `start..end` as a block, copying only those rows.
    pub fn block(&self, start: usize, end: usize) -> Result<SampleBlock> {
        match self {
            Dataset::Dense(x) => SampleBlock::dense(x.slice(s![start..end, ..]).to_owned()),
            Dataset::Sparse(x) => SampleBlock::sparse(x.slice_rows(start, end)),
        }
    }

    /// Single pass over the rows in blocks of `batch`; the last block may be short.
    pub fn stream(&self, batch: usize) -> Result<DatasetStream<'_>> {
        if batch == 0 {
            return Err(Error::InvalidArgument(
                "batch size must be at least 1".into(),
            ));
        }
        if self.rows() == 0 || self.dim() == 0 {
            return Err(Error::Degenerate("dataset is empty".into()));
        }
        Ok(DatasetStream {
            data: self,
            batch,
            pos: 0,
        })
    }
}

impl From<Array2<f64>> for Dataset {
    fn from(x: Array2<f64>) -> Self {
        Dataset::Dense(x)
    }
}

impl From<CsrMatrix> for Dataset {
    fn from(x: CsrMatrix) -> Self {
        Dataset::Sparse(x)
    }
}

/// Block stream over a borrowed [`Dataset`].
#[derive(Debug, Clone)]
pub struct DatasetStream<'a> {
    data: &'a Dataset,
    batch: usize,
    pos: usize,
}

impl SampleStream for DatasetStream<'_> {
    fn dim(&self) -> usize {
        self.data.dim()
    }

    fn batch(&self) -> usize {
        self.batch
    }

    fn total(&self) -> Option<usize> {
        Some(self.data.rows())
    }

    fn next_block(&mut self) -> Result<Option<SampleBlock>> {
        let n = self.data.rows();
        if self.pos >= n {
            return Ok(None);
        }
        let end = (self.pos + self.batch).min(n);
        let block = self.data.block(self.pos, end)?;
        self.pos = end;
        Ok(Some(block))
    }
}
