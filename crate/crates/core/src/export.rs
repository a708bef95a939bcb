// SPDX-License-Identifier: Apache-2.0

//! On-disk formats.
//!
//! - permutation: flat `u64` LE array of `order`, plus a JSON sidecar
//! - features: CSV with a header row, or flat `f32` LE row-major values
//!   plus a JSON shape sidecar

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::sfc::{PrecisionCheck, SortMode, Validity};
use crate::{Error, FeatureBlock, Permutation, Result, Roi, SortParams, Variant};

/// `<path>.json`, next to the data file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoiSource {
    Explicit,
    BoundingBox,
    RotationHull,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationSidecar {
    pub format: String,
    pub n: usize,
    pub variant: Variant,
    pub params: SortParams,
    pub angle: f64,
    pub mode: SortMode,
    pub roi: Roi,
    pub roi_source: RoiSource,
    pub validity: Validity,
    pub precision: PrecisionCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSidecar {
    pub format: String,
    pub rows: usize,
    pub cols: usize,
    pub columns: Vec<String>,
    pub k: usize,
    pub angles: Vec<f64>,
    pub params: SortParams,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).map_err(|e| Error::io(path, e))?,
    ))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_slice(&bytes)?)
}

pub fn write_permutation(path: &Path, perm: &Permutation) -> Result<()> {
    let mut w = create(path)?;
    for &i in perm.order() {
        w.write_all(&(i as u64).to_le_bytes())
            .map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_permutation(path: &Path) -> Result<Permutation> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Malformed {
            path: path.to_path_buf(),
            reason: format!("size {} is not a multiple of 8 bytes", bytes.len()),
        });
    }
    let order = bytes
        .chunks_exact(8)
        .map(|b| {
            let v = u64::from_le_bytes(b.try_into().unwrap());
            usize::try_from(v).map_err(|_| Error::Malformed {
                path: path.to_path_buf(),
                reason: format!("index {v} does not fit in usize"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Permutation::from_order(order).map_err(|e| Error::Malformed {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

pub fn write_features_csv(path: &Path, block: &FeatureBlock) -> Result<()> {
    let mut w = create(path)?;
    write_features_csv_to(&mut w, block).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_features_csv_to(w: &mut impl Write, block: &FeatureBlock) -> std::io::Result<()> {
    writeln!(w, "{}", block.columns().join(","))?;
    for i in 0..block.len() {
        let row: Vec<String> = block.row(i).iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Row-major `f32` LE values. The shape lives in the sidecar.
pub fn write_features_bin(path: &Path, block: &FeatureBlock) -> Result<()> {
    let mut w = create(path)?;
    for &v in block.as_flat() {
        w.write_all(&(v as f32).to_le_bytes())
            .map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_features_bin(path: &Path, sidecar: &FeatureSidecar) -> Result<FeatureBlock> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() != sidecar.rows * sidecar.cols * 4 || sidecar.columns.len() != sidecar.cols {
        return Err(Error::Malformed {
            path: path.to_path_buf(),
            reason: format!(
                "{} bytes do not match a {}x{} f32 block",
                bytes.len(),
                sidecar.rows,
                sidecar.cols
            ),
        });
    }
    let data = bytes
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()) as f64)
        .collect();
    FeatureBlock::new(sidecar.columns.clone(), data)
}
