//! Column-orthonormal subspace estimates and the projections that produce them.

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// Entrywise tolerance on `QᵀQ - I` accepted by [`Basis::from_orthonormal`].
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// Relative threshold on `|R[i,i]| / ‖M‖_F` below which QR reports rank deficiency.
pub const RANK_TOL: f64 = 1e-12;

/// A `d × k` matrix with orthonormal columns, `1 ≤ k ≤ d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    q: Array2<f64>,
}

impl Basis {
    /// Wraps a matrix that is already column-orthonormal to within [`ORTHONORMAL_TOL`].
    pub fn from_orthonormal(q: Array2<f64>) -> Result<Self> {
        check_shape(q.nrows(), q.ncols())?;
        let err = orthogonality_error(q.view());
        if err.is_nan() || err > ORTHONORMAL_TOL {
            return Err(Error::InvalidArgument(format!(
                "columns are not orthonormal (max |QᵀQ - I| = {err:e})"
            )));
        }
        Ok(Basis { q })
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn rank(&self) -> usize {
        self.q.ncols()
    }

    pub fn columns(&self) -> ArrayView2<'_, f64> {
        self.q.view()
    }

    pub fn column(&self, i: usize) -> ArrayView1<'_, f64> {
        self.q.column(i)
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.q
    }

    /// Max entrywise `|QᵀQ - I|`.
    pub fn orthogonality_error(&self) -> f64 {
        orthogonality_error(self.q.view())
    }
}

fn check_shape(d: usize, k: usize) -> Result<()> {
    if k == 0 || k > d {
        return Err(Error::InvalidArgument(format!(
            "basis needs 1 <= k <= d, got d={d} k={k}"
        )));
    }
    Ok(())
}

/// Max entrywise deviation of `QᵀQ` from the identity.
pub fn orthogonality_error(q: ArrayView2<f64>) -> f64 {
    let gram = q.t().dot(&q);
    gram.indexed_iter()
        .map(|((i, j), &v)| (v - if i == j { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max)
}

/// `v / ‖v‖₂`.
pub fn normalize_vector(v: ArrayView1<f64>) -> Result<Array1<f64>> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            what: "vector",
            detail: None,
        });
    }
    let top = max_abs(v.iter());
    if top == 0.0 {
        return Err(Error::Degenerate("cannot normalize the zero vector".into()));
    }
    // Dividing by the largest entry first keeps the squared norm from overflowing.
    let u = v.mapv(|x| x / top);
    let norm = u.dot(&u).sqrt();
    Ok(u.mapv(|x| x / norm))
}

fn max_abs<'a>(xs: impl Iterator<Item = &'a f64>) -> f64 {
    xs.fold(0.0, |m: f64, x| m.max(x.abs()))
}

/// Householder factors of a thin QR, kept so `Q` can be formed explicitly.
struct Householder {
    /// Unit reflector for column `j`, supported on rows `j..`.
    vectors: Vec<Array1<f64>>,
    diag: Vec<f64>,
}

fn householder(m: ArrayView2<f64>) -> Result<Householder> {
    let k = m.ncols();
    let scale = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = RANK_TOL * scale;
    let mut a = m.to_owned();
    let mut vectors = Vec::with_capacity(k);
    let mut diag = Vec::with_capacity(k);

    for j in 0..k {
        let x = a.slice(s![j.., j]);
        let norm = x.dot(&x).sqrt();
        // alpha takes the opposite sign of x[0] so v[0] = x[0] - alpha does not cancel.
        let alpha = if x[0] > 0.0 { -norm } else { norm };
        if norm.is_nan() || norm < threshold || norm == 0.0 {
            return Err(Error::RankDeficient {
                column: j,
                diag: norm,
                threshold,
            });
        }
        let mut v = x.to_owned();
        v[0] -= alpha;
        let vnorm = v.dot(&v).sqrt();
        if vnorm > 0.0 {
            v /= vnorm;
            let mut tail = a.slice_mut(s![j.., j..]);
            let proj = v.dot(&tail);
            for (mut col, p) in tail.columns_mut().into_iter().zip(proj.iter()) {
                col.scaled_add(-2.0 * p, &v);
            }
        }
        diag.push(alpha);
        vectors.push(v);
    }
    Ok(Householder { vectors, diag })
}

/// Thin QR projection onto the set of orthonormal frames.
///
/// Returns `Q` with each column's sign chosen so the matching diagonal entry of
/// `R` is nonnegative. Fails with [`Error::RankDeficient`] when some
/// `|R[i,i]| < 1e-12 · ‖M‖_F`.
pub fn orthonormalize(m: ArrayView2<f64>) -> Result<Basis> {
    let (d, k) = m.dim();
    check_shape(d, k)?;
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            what: "matrix to orthonormalize",
            detail: None,
        });
    }
    // Q is unchanged by a positive overall scale, and working at unit scale
    // keeps the column norms from overflowing.
    let top = max_abs(m.iter());
    let h = if top > 0.0 {
        householder(m.mapv(|x| x / top).view())?
    } else {
        householder(m)?
    };

    let mut q = Array2::zeros((d, k));
    for j in 0..k {
        q[[j, j]] = 1.0;
    }
    for j in (0..k).rev() {
        let v = &h.vectors[j];
        let mut tail = q.slice_mut(s![j.., j..]);
        let proj = v.dot(&tail);
        for (mut col, p) in tail.columns_mut().into_iter().zip(proj.iter()) {
            col.scaled_add(-2.0 * p, v);
        }
    }
    for (j, &r) in h.diag.iter().enumerate() {
        if r < 0.0 {
            q.column_mut(j).mapv_inplace(|x| -x);
        }
    }
    Ok(Basis { q })
}

/// Both thin QR factors with the same sign convention as [`orthonormalize`].
pub fn thin_qr(m: ArrayView2<f64>) -> Result<(Basis, Array2<f64>)> {
    let q = orthonormalize(m)?;
    let r = q.columns().t().dot(&m);
    let k = m.ncols();
    let mut upper = Array2::zeros((k, k));
    for i in 0..k {
        for j in i..k {
            upper[[i, j]] = r[[i, j]];
        }
    }
    Ok((q, upper))
}

/// Single-column basis from a vector, the `k = 1` projection.
pub fn unit_basis(v: ArrayView1<f64>) -> Result<Basis> {
    let u = normalize_vector(v)?;
    let n = u.len();
    Ok(Basis {
        q: u.into_shape_with_order((n, 1)).expect("contiguous vector"),
    })
}
