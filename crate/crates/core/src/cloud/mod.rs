// SPDX-License-Identifier: Apache-2.0

//! Columnar point clouds, SemanticKITTI IO, sampling and synthetic scenes.

mod kitti;
mod synth;

pub use kitti::{
    load_kitti_bin, load_labels, read_kitti_bin, read_labels, write_kitti_bin, write_labels,
};
pub use synth::{synth_scene, GroundRect, PillarObject, SceneSpec};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// N points stored column-wise.
///
/// Coordinates are kept in `f64` even though scans arrive as `f32`; widening
/// is exact, so KITTI round-trips stay bit-exact and differences of stored
/// coordinates are exact for clouds of ordinary extent.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
    intensity: Option<Vec<f32>>,
    labels: Option<Vec<u16>>,
}

impl PointCloud {
    /// Builds a cloud from coordinate columns. Rejects ragged columns and
    /// non-finite coordinates.
    pub fn new(x: Vec<f64>, y: Vec<f64>, z: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() != z.len() {
            return Err(Error::Mismatch(format!(
                "coordinate columns have lengths {}, {}, {}",
                x.len(),
                y.len(),
                z.len()
            )));
        }
        if let Some(index) =
            (0..x.len()).find(|&i| !(x[i].is_finite() && y[i].is_finite() && z[i].is_finite()))
        {
            return Err(Error::NonFinite { index });
        }
        Ok(PointCloud {
            x,
            y,
            z,
            intensity: None,
            labels: None,
        })
    }

    pub fn from_points(points: &[[f64; 3]]) -> Result<Self> {
        Self::new(
            points.iter().map(|p| p[0]).collect(),
            points.iter().map(|p| p[1]).collect(),
            points.iter().map(|p| p[2]).collect(),
        )
    }

    pub fn empty() -> Self {
        PointCloud {
            x: Vec::new(),
            y: Vec::new(),
            z: Vec::new(),
            intensity: None,
            labels: None,
        }
    }

    pub fn with_intensity(mut self, intensity: Vec<f32>) -> Result<Self> {
        if intensity.len() != self.len() {
            return Err(Error::Mismatch(format!(
                "{} intensities for {} points",
                intensity.len(),
                self.len()
            )));
        }
        self.intensity = Some(intensity);
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<u16>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::Mismatch(format!(
                "{} labels for {} points",
                labels.len(),
                self.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn without_labels(mut self) -> Self {
        self.labels = None;
        self
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.x.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    #[inline]
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    #[inline]
    pub fn y(&self) -> &[f64] {
        &self.y
    }

    #[inline]
    pub fn z(&self) -> &[f64] {
        &self.z
    }

    #[inline]
    pub fn point(&self, i: usize) -> [f64; 3] {
        [self.x[i], self.y[i], self.z[i]]
    }

    pub fn intensity(&self) -> Option<&[f32]> {
        self.intensity.as_deref()
    }

    pub fn labels(&self) -> Option<&[u16]> {
        self.labels.as_deref()
    }

    /// Copy of the cloud with new x/y columns; z, intensity and labels carried over.
    pub(crate) fn with_xy(&self, x: Vec<f64>, y: Vec<f64>) -> Self {
        debug_assert_eq!(x.len(), self.len());
        debug_assert_eq!(y.len(), self.len());
        PointCloud {
            x,
            y,
            z: self.z.clone(),
            intensity: self.intensity.clone(),
            labels: self.labels.clone(),
        }
    }

    /// Shifts every point by `offset`.
    pub fn translated(&self, offset: [f64; 3]) -> Result<Self> {
        let mut out = Self::new(
            self.x.iter().map(|v| v + offset[0]).collect(),
            self.y.iter().map(|v| v + offset[1]).collect(),
            self.z.iter().map(|v| v + offset[2]).collect(),
        )?;
        out.intensity = self.intensity.clone();
        out.labels = self.labels.clone();
        Ok(out)
    }

    /// The sub-cloud at `indices`, in the given order. Panics on out-of-range indices.
    pub fn select(&self, indices: &[usize]) -> Self {
        let pick = |col: &[f64]| indices.iter().map(|&i| col[i]).collect::<Vec<_>>();
        PointCloud {
            x: pick(&self.x),
            y: pick(&self.y),
            z: pick(&self.z),
            intensity: self
                .intensity
                .as_ref()
                .map(|v| indices.iter().map(|&i| v[i]).collect()),
            labels: self
                .labels
                .as_ref()
                .map(|v| indices.iter().map(|&i| v[i]).collect()),
        }
    }

    /// Axis-aligned bounds as `([min_x, min_y, min_z], [max_x, max_y, max_z])`,
    /// or `None` for an empty cloud.
    pub fn bounds(&self) -> Option<([f64; 3], [f64; 3])> {
        if self.is_empty() {
            return None;
        }
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for i in 0..self.len() {
            let p = self.point(i);
            for a in 0..3 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        Some((lo, hi))
    }
}

/// Indices of a uniform random subset of size `target` drawn without
/// replacement from `0..n`, ascending. Returns all of `0..n` when `n <= target`.
pub fn sample_indices(n: usize, target: usize, seed: u64) -> Result<Vec<usize>> {
    if target == 0 {
        return Err(Error::invalid("sample target must be positive"));
    }
    if n <= target {
        return Ok((0..n).collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = rand::seq::index::sample(&mut rng, n, target).into_vec();
    idx.sort_unstable();
    Ok(idx)
}

/// Downsamples to `target` points (uniform, without replacement, seeded).
/// Clouds already at or below `target` come back unchanged.
pub fn sample_points(cloud: &PointCloud, target: usize, seed: u64) -> Result<PointCloud> {
    if target == 0 {
        return Err(Error::invalid("sample target must be positive"));
    }
    if cloud.len() <= target {
        return Ok(cloud.clone());
    }
    let idx = sample_indices(cloud.len(), target, seed)?;
    Ok(cloud.select(&idx))
}
