//! Pull-based, single-pass sources of sample blocks.

use crate::block::SampleBlock;
use crate::error::Result;

/// A single-pass source of [`SampleBlock`]s of a fixed dimension.
///
/// Once `next_block` returns `Ok(None)` it keeps returning `Ok(None)`.
pub trait SampleStream {
    fn dim(&self) -> usize;

    /// Nominal block size. The last block may be smaller.
    fn batch(&self) -> usize;

    /// Total number of samples, when known up front.
    fn total(&self) -> Option<usize> {
        None
    }

    fn next_block(&mut self) -> Result<Option<SampleBlock>>;
}

impl<S: SampleStream + ?Sized> SampleStream for Box<S> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn batch(&self) -> usize {
        (**self).batch()
    }

    fn total(&self) -> Option<usize> {
        (**self).total()
    }

    fn next_block(&mut self) -> Result<Option<SampleBlock>> {
        (**self).next_block()
    }
}

/// A stream over blocks that are already in memory.
#[derive(Debug, Clone)]
pub struct BlockStream {
    dim: usize,
    batch: usize,
    blocks: std::vec::IntoIter<SampleBlock>,
    total: usize,
}

impl BlockStream {
    /// All blocks must share `dim`; the batch size reported is the first block's row count.
    pub fn new(dim: usize, blocks: Vec<SampleBlock>) -> Result<Self> {
        if let Some(b) = blocks.iter().find(|b| b.dim() != dim) {
            return Err(crate::Error::DimensionMismatch(format!(
                "stream dim {dim}, block dim {}",
                b.dim()
            )));
        }
        let batch = blocks.first().map_or(1, SampleBlock::rows);
        let total = blocks.iter().map(SampleBlock::rows).sum();
        Ok(BlockStream {
            dim,
            batch,
            blocks: blocks.into_iter(),
            total,
        })
    }
}

impl SampleStream for BlockStream {
    fn dim(&self) -> usize {
        self.dim
    }

    fn batch(&self) -> usize {
        self.batch
    }

    fn total(&self) -> Option<usize> {
        Some(self.total)
    }

    fn next_block(&mut self) -> Result<Option<SampleBlock>> {
        Ok(self.blocks.next())
    }
}
