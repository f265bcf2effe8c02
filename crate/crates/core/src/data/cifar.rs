//! CIFAR-10 binary batches, reduced to grayscale.
//!
//! A record is one label byte then 3 × 1024 pixel bytes (red, green, blue
//! planes, row-major 32 × 32). Each output row is the per-pixel average of
//! the three planes; labels are dropped.

use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

pub const CIFAR_PIXELS: usize = 1024;
pub const CIFAR_RECORD: usize = 1 + 3 * CIFAR_PIXELS;

pub fn parse_cifar(bytes: &[u8]) -> Result<Array2<f64>> {
    if !bytes.len().is_multiple_of(CIFAR_RECORD) {
        return Err(Error::Format(format!(
            "CIFAR batch length {} is not a multiple of {CIFAR_RECORD}",
            bytes.len()
        )));
    }
    let n = bytes.len() / CIFAR_RECORD;
    let mut out = Array2::zeros((n, CIFAR_PIXELS));
    for (record, mut row) in bytes.chunks_exact(CIFAR_RECORD).zip(out.rows_mut()) {
        let planes = &record[1..];
        let (r, rest) = planes.split_at(CIFAR_PIXELS);
        let (g, b) = rest.split_at(CIFAR_PIXELS);
        for (p, v) in row.iter_mut().enumerate() {
            *v = (r[p] as u32 + g[p] as u32 + b[p] as u32) as f64 / 3.0;
        }
    }
    Ok(out)
}

/// Loads and concatenates batch files in the order given.
pub fn load_cifar<P: AsRef<Path>>(paths: &[P]) -> Result<Array2<f64>> {
    let mut parts = Vec::with_capacity(paths.len());
    for path in paths {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        parts.push(parse_cifar(&bytes).map_err(|e| match e {
            Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
            e => e,
        })?);
    }
    let views: Vec<_> = parts.iter().map(|p| p.view()).collect();
    if views.is_empty() {
        return Err(Error::InvalidArgument("no CIFAR batch files given".into()));
    }
    Ok(ndarray::concatenate(ndarray::Axis(0), &views).expect("same width"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(label: u8, r: u8, g: u8, b: u8) -> Vec<u8> {
        let mut v = vec![label];
        v.extend(std::iter::repeat_n(r, CIFAR_PIXELS));
        v.extend(std::iter::repeat_n(g, CIFAR_PIXELS));
        v.extend(std::iter::repeat_n(b, CIFAR_PIXELS));
        v
    }

    #[test]
    fn white_image() {
        let x = parse_cifar(&record(3, 255, 255, 255)).unwrap();
        assert_eq!(x.dim(), (1, 1024));
        assert!(x.iter().all(|&v| v == 255.0));
    }

    #[test]
    fn plane_average_and_count() {
        let mut bytes = record(0, 30, 60, 90);
        bytes.extend(record(9, 0, 0, 3));
        let x = parse_cifar(&bytes).unwrap();
        assert_eq!(x.nrows(), 2);
        assert_eq!(x[[0, 17]], 60.0);
        assert_eq!(x[[1, 1023]], 1.0);
    }

    #[test]
    fn bad_length() {
        assert!(matches!(parse_cifar(&[0u8; 3074]), Err(Error::Format(_))));
    }
}
