//! Binary container for dense datasets.
//!
//! Little-endian layout: magic `SPCA`, version `u32`, `n: u64`, `d: u64`,
//! dtype tag `f64\0` (4 bytes), then `n · d` row-major `f64` values.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

pub const SPCA_MAGIC: [u8; 4] = *b"SPCA";
pub const SPCA_VERSION: u32 = 1;
const DTYPE_F64: [u8; 4] = *b"f64\0";

pub fn write_spca<W: Write>(mut out: W, x: &Array2<f64>) -> std::io::Result<()> {
    out.write_all(&SPCA_MAGIC)?;
    out.write_all(&SPCA_VERSION.to_le_bytes())?;
    out.write_all(&(x.nrows() as u64).to_le_bytes())?;
    out.write_all(&(x.ncols() as u64).to_le_bytes())?;
    out.write_all(&DTYPE_F64)?;
    for v in x.iter() {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()
}

pub fn read_spca<R: Read>(mut input: R) -> Result<Array2<f64>> {
    let fmt = |m: String| Error::Format(m);
    let mut head = [0u8; 28];
    input
        .read_exact(&mut head)
        .map_err(|e| fmt(format!("truncated SPCA header: {e}")))?;
    if head[0..4] != SPCA_MAGIC {
        return Err(fmt("bad magic, not an SPCA container".into()));
    }
    let version = u32::from_le_bytes(head[4..8].try_into().unwrap());
    if version != SPCA_VERSION {
        return Err(fmt(format!("unsupported SPCA version {version}")));
    }
    let n = u64::from_le_bytes(head[8..16].try_into().unwrap()) as usize;
    let d = u64::from_le_bytes(head[16..24].try_into().unwrap()) as usize;
    if head[24..28] != DTYPE_F64 {
        return Err(fmt("unsupported dtype, expected f64".into()));
    }
    let len = n
        .checked_mul(d)
        .ok_or_else(|| fmt(format!("shape {n}x{d} overflows")))?;
    let mut bytes = Vec::new();
    input
        .read_to_end(&mut bytes)
        .map_err(|e| fmt(format!("reading SPCA payload: {e}")))?;
    if bytes.len() != len * 8 {
        return Err(fmt(format!(
            "payload has {} bytes, expected {} for {n}x{d}",
            bytes.len(),
            len * 8
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(Array2::from_shape_vec((n, d), values).expect("length checked"))
}

pub fn write_spca_file(path: impl AsRef<Path>, x: &Array2<f64>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_spca(BufWriter::new(file), x).map_err(|e| Error::io(path, e))
}

pub fn read_spca_file(path: impl AsRef<Path>) -> Result<Array2<f64>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_spca(BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn header_layout() {
        let mut buf = Vec::new();
        write_spca(&mut buf, &array![[1.5, -2.0]]).unwrap();
        assert_eq!(&buf[0..4], b"SPCA");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 1);
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 1);
        assert_eq!(u64::from_le_bytes(buf[16..24].try_into().unwrap()), 2);
        assert_eq!(&buf[24..28], b"f64\0");
        assert_eq!(buf.len(), 28 + 16);
        assert_eq!(read_spca(buf.as_slice()).unwrap(), array![[1.5, -2.0]]);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_spca(&b"NOPE"[..]).is_err());
        let mut buf = Vec::new();
        write_spca(&mut buf, &array![[1.0, 2.0]]).unwrap();
        buf.pop();
        assert!(matches!(read_spca(buf.as_slice()), Err(Error::Format(_))));
    }
}
