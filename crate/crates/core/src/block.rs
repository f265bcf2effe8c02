//! Mini-batches of samples and the stochastic block gradient.

use ndarray::{Array2, ArrayView2, Axis};

use crate::basis::Basis;
use crate::error::{Error, Result};

/// Compressed sparse rows. Rows are samples, columns are attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        indptr: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if indptr.len() != rows + 1 {
            return Err(Error::InvalidArgument(format!(
                "row offsets have length {}, expected {}",
                indptr.len(),
                rows + 1
            )));
        }
        if indptr[0] != 0 {
            return Err(Error::InvalidArgument("first row offset must be 0".into()));
        }
        if indptr.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidArgument(
                "row offsets must be nondecreasing".into(),
            ));
        }
        if indices.len() != values.len() || indptr[rows] != indices.len() {
            return Err(Error::InvalidArgument(format!(
                "last row offset {} does not match nnz {} (values {})",
                indptr[rows],
                indices.len(),
                values.len()
            )));
        }
        if let Some(&bad) = indices.iter().find(|&&j| j >= cols) {
            return Err(Error::InvalidArgument(format!(
                "column index {bad} out of range for {cols} columns"
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "sparse values",
                detail: None,
            });
        }
        Ok(CsrMatrix {
            rows,
            cols,
            indptr,
            indices,
            values,
        })
    }

    pub fn from_dense(dense: ArrayView2<f64>) -> Self {
        let mut indptr = Vec::with_capacity(dense.nrows() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for row in dense.rows() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    indices.push(j);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        CsrMatrix {
            rows: dense.nrows(),
            cols: dense.ncols(),
            indptr,
            indices,
            values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of one row.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.indptr[r]..self.indptr[r + 1];
        (&self.indices[span.clone()], &self.values[span])
    }

    /// Copy of rows `start..end`, offsets rebased to zero.
    pub fn slice_rows(&self, start: usize, end: usize) -> CsrMatrix {
        assert!(start <= end && end <= self.rows);
        let lo = self.indptr[start];
        let hi = self.indptr[end];
        CsrMatrix {
            rows: end - start,
            cols: self.cols,
            indptr: self.indptr[start..=end].iter().map(|p| p - lo).collect(),
            indices: self.indices[lo..hi].to_vec(),
            values: self.values[lo..hi].to_vec(),
        }
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.rows, self.cols));
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            for (&j, &v) in idx.iter().zip(val) {
                out[[r, j]] += v;
            }
        }
        out
    }

    /// `self · w`, shape rows × k.
    pub fn mul_dense(&self, w: ArrayView2<f64>) -> Array2<f64> {
        assert_eq!(w.nrows(), self.cols);
        let mut out = Array2::zeros((self.rows, w.ncols()));
        for (r, mut out_row) in out.axis_iter_mut(Axis(0)).enumerate() {
            let (idx, val) = self.row(r);
            for (&j, &v) in idx.iter().zip(val) {
                out_row.scaled_add(v, &w.row(j));
            }
        }
        out
    }

    /// `selfᵀ · y`, shape cols × k.
    pub fn transpose_mul_dense(&self, y: ArrayView2<f64>) -> Array2<f64> {
        assert_eq!(y.nrows(), self.rows);
        let mut out = Array2::zeros((self.cols, y.ncols()));
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            let y_row = y.row(r);
            for (&j, &v) in idx.iter().zip(val) {
                out.row_mut(j).scaled_add(v, &y_row);
            }
        }
        out
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Dense(Array2<f64>),
    Sparse(CsrMatrix),
}

/// One mini-batch of `rows` samples in `dim` dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBlock {
    payload: Payload,
}

impl SampleBlock {
    pub fn dense(x: Array2<f64>) -> Result<Self> {
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::InvalidArgument(format!(
                "block must be at least 1x1, got {}x{}",
                x.nrows(),
                x.ncols()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "sample block",
                detail: None,
            });
        }
        Ok(SampleBlock {
            payload: Payload::Dense(x),
        })
    }

    pub fn sparse(x: CsrMatrix) -> Result<Self> {
        if x.rows() == 0 || x.cols() == 0 {
            return Err(Error::InvalidArgument(format!(
                "block must be at least 1x1, got {}x{}",
                x.rows(),
                x.cols()
            )));
        }
        Ok(SampleBlock {
            payload: Payload::Sparse(x),
        })
    }

    pub fn rows(&self) -> usize {
        match &self.payload {
            Payload::Dense(x) => x.nrows(),
            Payload::Sparse(x) => x.rows(),
        }
    }

    pub fn dim(&self) -> usize {
        match &self.payload {
            Payload::Dense(x) => x.ncols(),
            Payload::Sparse(x) => x.cols(),
        }
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.payload, Payload::Sparse(_))
    }

    pub fn to_dense(&self) -> Array2<f64> {
        match &self.payload {
            Payload::Dense(x) => x.clone(),
            Payload::Sparse(x) => x.to_dense(),
        }
    }

    /// `X · w` (B × k).
    pub fn project(&self, w: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check_dim(w.nrows())?;
        Ok(match &self.payload {
            Payload::Dense(x) => x.dot(&w),
            Payload::Sparse(x) => x.mul_dense(w),
        })
    }

    /// `Xᵀ · y` (d × k) for `y` with one row per sample.
    pub fn transpose_mul(&self, y: ArrayView2<f64>) -> Result<Array2<f64>> {
        if y.nrows() != self.rows() {
            return Err(Error::DimensionMismatch(format!(
                "block has {} rows, right operand has {}",
                self.rows(),
                y.nrows()
            )));
        }
        Ok(match &self.payload {
            Payload::Dense(x) => x.t().dot(&y),
            Payload::Sparse(x) => x.transpose_mul_dense(y),
        })
    }

    /// `(1/B) Xᵀ (X w)` for an arbitrary `d × k` matrix `w`.
    ///
    /// This is the gradient of `(1/2B) ‖X w‖_F²`. The Gram matrix `XᵀX` is never formed.
    pub fn gradient(&self, w: ArrayView2<f64>) -> Result<Array2<f64>> {
        let xw = self.project(w)?;
        let mut g = self.transpose_mul(xw.view())?;
        g /= self.rows() as f64;
        Ok(g)
    }

    pub fn frobenius_sq(&self) -> f64 {
        match &self.payload {
            Payload::Dense(x) => x.iter().map(|v| v * v).sum(),
            Payload::Sparse(x) => x.frobenius_sq(),
        }
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "block dim {} vs operand dim {d}",
                self.dim()
            )));
        }
        Ok(())
    }
}

/// Stochastic gradient `G = (1/B) Xᵀ X W` of one block at the current basis.
pub fn block_gradient(block: &SampleBlock, basis: &Basis) -> Result<Array2<f64>> {
    block.gradient(basis.columns())
}
