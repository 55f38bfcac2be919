//! Binary field dumps.
//!
//! Layout (little-endian): `b"BLAB"`, `u8` version (1), `u8` dimension,
//! `u8` domain tag (0 physical, 1 spectral), `u64` points per axis, `f64`
//! half-extent, then `N^n` values as interleaved `(re, im)` `f64` pairs in
//! row-major order.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::field::{Domain, Field};
use super::grid::GridSpec;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"BLAB";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 4 + 1 + 1 + 1 + 8 + 8;

pub fn write_field<W: Write>(field: &Field, mut w: W) -> Result<()> {
    let g = field.grid();
    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(MAGIC);
    header.push(VERSION);
    header.push(g.dim() as u8);
    header.push(field.domain().tag());
    header.extend_from_slice(&(g.points() as u64).to_le_bytes());
    header.extend_from_slice(&g.half_extent().to_le_bytes());
    w.write_all(&header)?;

    let mut body = Vec::with_capacity(field.values().len() * 16);
    for v in field.values() {
        body.extend_from_slice(&v.re.to_le_bytes());
        body.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&body)?;
    Ok(())
}

pub fn read_field<R: Read>(mut r: R) -> Result<Field> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)
        .map_err(|e| Error::Format(format!("truncated header: {e}")))?;
    if &header[0..4] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    if header[4] != VERSION {
        return Err(Error::Format(format!("unsupported version {}", header[4])));
    }
    let dim = header[5] as usize;
    let domain = Domain::from_tag(header[6])
        .ok_or_else(|| Error::Format(format!("unknown domain tag {}", header[6])))?;
    let points = u64::from_le_bytes(header[7..15].try_into().expect("8 bytes"));
    let half_extent = f64::from_le_bytes(header[15..23].try_into().expect("8 bytes"));
    let points = usize::try_from(points).map_err(|_| Error::Format("point count overflow".into()))?;
    let grid = GridSpec::new(dim, half_extent, points)
        .map_err(|e| Error::Format(format!("bad grid in header: {e}")))?;

    let mut body = vec![0u8; grid.len() * 16];
    r.read_exact(&mut body)
        .map_err(|e| Error::Format(format!("truncated body: {e}")))?;
    let values = body
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[0..8].try_into().expect("8 bytes")),
                f64::from_le_bytes(c[8..16].try_into().expect("8 bytes")),
            )
        })
        .collect();
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(Error::Format("trailing bytes after field data".into()));
    }
    Field::new(grid, domain, values)
}
