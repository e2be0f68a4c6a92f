//! `.fvecs` / `.ivecs` files.
//!
//! Each record is a little-endian `i32` dimension followed by that many
//! little-endian payload words (`f32` for fvecs, `i32` for ivecs). All
//! records in a file share one dimension, so the file length is a multiple
//! of `4 * (d + 1)`.

use std::fs;
use std::path::Path;

use crate::atomic::write_atomic;
use crate::dataset::VectorDataset;
use crate::error::{Error, Result};

pub fn encode_fvecs(ds: &VectorDataset) -> Vec<u8> {
    let d = ds.dim();
    let mut out = Vec::with_capacity(ds.len() * 4 * (d + 1));
    for row in ds.rows() {
        out.extend_from_slice(&(d as i32).to_le_bytes());
        for x in row {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

fn record_dim(bytes: &[u8], kind: &'static str) -> Result<usize> {
    if bytes.len() < 4 {
        return Err(Error::format(kind, "file is empty or truncated"));
    }
    let d = i32::from_le_bytes(bytes[..4].try_into().unwrap());
    if d <= 0 {
        return Err(Error::format(kind, format!("invalid dimension {d}")));
    }
    let d = d as usize;
    if bytes.len() % (4 * (d + 1)) != 0 {
        return Err(Error::format(
            kind,
            format!(
                "length {} is not a multiple of record size {}",
                bytes.len(),
                4 * (d + 1)
            ),
        ));
    }
    Ok(d)
}

fn decode_records(bytes: &[u8], kind: &'static str) -> Result<(usize, Vec<[u8; 4]>)> {
    let d = record_dim(bytes, kind)?;
    let rec = 4 * (d + 1);
    let mut words = Vec::with_capacity(bytes.len() / rec * d);
    for (i, chunk) in bytes.chunks_exact(rec).enumerate() {
        let rd = i32::from_le_bytes(chunk[..4].try_into().unwrap());
        if rd as usize != d {
            return Err(Error::format(
                kind,
                format!("record {i} has dimension {rd}, expected {d}"),
            ));
        }
        words.extend(chunk[4..].chunks_exact(4).map(|w| <[u8; 4]>::try_from(w).unwrap()));
    }
    Ok((d, words))
}

pub fn decode_fvecs(bytes: &[u8]) -> Result<VectorDataset> {
    let (d, words) = decode_records(bytes, "fvecs")?;
    let data: Vec<f32> = words.into_iter().map(f32::from_le_bytes).collect();
    VectorDataset::new(d, data).map_err(|e| Error::format("fvecs", e.to_string()))
}

pub fn read_fvecs(path: impl AsRef<Path>) -> Result<VectorDataset> {
    decode_fvecs(&fs::read(path)?)
}

pub fn write_fvecs(path: impl AsRef<Path>, ds: &VectorDataset) -> Result<()> {
    write_atomic(path, &encode_fvecs(ds))
}

pub fn encode_ivecs(rows: &[Vec<i32>]) -> Result<Vec<u8>> {
    let Some(d) = rows.first().map(Vec::len) else {
        return Ok(Vec::new());
    };
    if d == 0 {
        return Err(Error::invalid("ivecs rows must be non-empty"));
    }
    let mut out = Vec::with_capacity(rows.len() * 4 * (d + 1));
    for row in rows {
        if row.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: row.len(),
            });
        }
        out.extend_from_slice(&(d as i32).to_le_bytes());
        for x in row {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn decode_ivecs(bytes: &[u8]) -> Result<Vec<Vec<i32>>> {
    let (d, words) = decode_records(bytes, "ivecs")?;
    Ok(words
        .chunks_exact(d)
        .map(|r| r.iter().map(|w| i32::from_le_bytes(*w)).collect())
        .collect())
}

pub fn read_ivecs(path: impl AsRef<Path>) -> Result<Vec<Vec<i32>>> {
    decode_ivecs(&fs::read(path)?)
}

pub fn write_ivecs(path: impl AsRef<Path>, rows: &[Vec<i32>]) -> Result<()> {
    write_atomic(path, &encode_ivecs(rows)?)
}
