//! Per-attribute mean removal.
//!
//! This is a data-preparation pre-pass over the full matrix. It sits outside
//! the single-pass budget of the streaming estimators.

use ndarray::{Array1, Array2, Axis};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CenteringStats {
    pub mean: Array1<f64>,
    pub count: usize,
}

pub fn center(x: &Array2<f64>) -> Result<(Array2<f64>, CenteringStats)> {
    if x.nrows() == 0 || x.ncols() == 0 {
        return Err(Error::InvalidArgument(format!(
            "cannot center an empty {}x{} matrix",
            x.nrows(),
            x.ncols()
        )));
    }
    let mean = x.mean_axis(Axis(0)).expect("nonempty");
    let centered = x - &mean.view().insert_axis(Axis(0));
    Ok((
        centered,
        CenteringStats {
            mean,
            count: x.nrows(),
        },
    ))
}
