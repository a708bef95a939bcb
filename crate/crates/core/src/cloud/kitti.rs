// SPDX-License-Identifier: Apache-2.0

//! SemanticKITTI scan layout: `.bin` holds `f32` LE `x, y, z, remission`
//! per point (16 bytes); `.label` holds one `u32` LE per point with the
//! semantic class in the low 16 bits and the instance id in the high 16.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::PointCloud;
use crate::{Error, Result};

const POINT_BYTES: usize = 16;
const LABEL_BYTES: usize = 4;

pub fn load_kitti_bin(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_bin(&bytes, path)
}

/// Reads a scan from any byte stream; `name` is used in error messages.
pub fn read_kitti_bin(mut reader: impl Read, name: &str) -> Result<PointCloud> {
    let mut bytes = Vec::new();
    reader
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io(name, e))?;
    parse_bin(&bytes, Path::new(name))
}

fn parse_bin(bytes: &[u8], path: &Path) -> Result<PointCloud> {
    if !bytes.len().is_multiple_of(POINT_BYTES) {
        return Err(Error::Malformed {
            path: path.to_path_buf(),
            reason: format!(
                "size {} is not a multiple of {POINT_BYTES} bytes",
                bytes.len()
            ),
        });
    }
    let n = bytes.len() / POINT_BYTES;
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    let mut intensity = Vec::with_capacity(n);
    for (i, rec) in bytes.chunks_exact(POINT_BYTES).enumerate() {
        let f = |o: usize| f32::from_le_bytes([rec[o], rec[o + 1], rec[o + 2], rec[o + 3]]);
        let (px, py, pz) = (f(0), f(4), f(8));
        if !(px.is_finite() && py.is_finite() && pz.is_finite()) {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                reason: format!("non-finite coordinate at point {i}"),
            });
        }
        x.push(px as f64);
        y.push(py as f64);
        z.push(pz as f64);
        intensity.push(f(12));
    }
    PointCloud::new(x, y, z)?.with_intensity(intensity)
}

/// Attaches the semantic labels in `path` to `cloud`.
pub fn load_labels(path: impl AsRef<Path>, cloud: PointCloud) -> Result<PointCloud> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let labels = parse_labels(&bytes, path)?;
    attach(labels, cloud)
}

pub fn read_labels(mut reader: impl Read, name: &str, cloud: PointCloud) -> Result<PointCloud> {
    let mut bytes = Vec::new();
    reader
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io(name, e))?;
    attach(parse_labels(&bytes, Path::new(name))?, cloud)
}

fn attach(labels: Vec<u16>, cloud: PointCloud) -> Result<PointCloud> {
    if labels.len() != cloud.len() {
        return Err(Error::Mismatch(format!(
            "label file has {} entries but cloud has {} points",
            labels.len(),
            cloud.len()
        )));
    }
    cloud.with_labels(labels)
}

fn parse_labels(bytes: &[u8], path: &Path) -> Result<Vec<u16>> {
    if !bytes.len().is_multiple_of(LABEL_BYTES) {
        return Err(Error::Malformed {
            path: path.to_path_buf(),
            reason: format!(
                "size {} is not a multiple of {LABEL_BYTES} bytes",
                bytes.len()
            ),
        });
    }
    Ok(bytes
        .chunks_exact(LABEL_BYTES)
        .map(|b| (u32::from_le_bytes([b[0], b[1], b[2], b[3]]) & 0xFFFF) as u16)
        .collect())
}

/// Writes the cloud in the `.bin` layout. Coordinates are narrowed to `f32`;
/// missing intensity is written as 0.
pub fn write_kitti_bin(path: impl AsRef<Path>, cloud: &PointCloud) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for i in 0..cloud.len() {
        let p = cloud.point(i);
        let r = cloud.intensity().map_or(0.0, |v| v[i]);
        for v in [p[0] as f32, p[1] as f32, p[2] as f32, r] {
            w.write_all(&v.to_le_bytes())
                .map_err(|e| Error::io(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes labels as `u32` LE with a zero instance id.
pub fn write_labels(path: impl AsRef<Path>, labels: &[u16]) -> Result<()> {
    let path = path.as_ref();
    let bytes: Vec<u8> = labels
        .iter()
        .flat_map(|&l| (l as u32).to_le_bytes())
        .collect();
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
