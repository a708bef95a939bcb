// SPDX-License-Identifier: Apache-2.0

//! Rotations about z and the per-angle orderings built from them.
//!
//! One ordering only links points that share a pillar, so points in
//! neighboring pillars can end up far apart in the sequence. Sorting several
//! rotated copies of the cloud with the same scorer gives each point a
//! different set of sequence neighbors per view.

use std::f64::consts::PI;

use crate::exec::{self, Execution};
use crate::sfc::{cell_index, sort_cloud_with, Permutation, SortMode, SortParams};
use crate::{Error, PointCloud, Result};

/// `0, pi/4, pi/2, 3pi/4`.
pub const DEFAULT_ANGLES: [f64; 4] = [0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0];

/// `m` angles spread over a half turn: `j * pi / m` for `j < m`.
pub fn evenly_spaced_angles(m: usize) -> Vec<f64> {
    (0..m).map(|j| j as f64 * PI / m as f64).collect()
}

/// Rotates every point by `angle` radians about the z axis.
pub fn rotate_z(cloud: &PointCloud, angle: f64) -> Result<PointCloud> {
    if !angle.is_finite() {
        return Err(Error::invalid(format!(
            "rotation angle {angle} is not finite"
        )));
    }
    let (s, c) = angle.sin_cos();
    let (x, y) = (cloud.x(), cloud.y());
    let xr = x.iter().zip(y).map(|(&x, &y)| x * c - y * s).collect();
    let yr = x.iter().zip(y).map(|(&x, &y)| x * s + y * c).collect();
    Ok(cloud.with_xy(xr, yr))
}

/// The `y`-dominant scorer: the x and y priority weights exchanged, so the
/// sequence walks y pillars first. Reads `k_x` as the dominant weight and
/// `k_y` as the secondary one.
#[inline]
pub fn score_swapped(x: f64, y: f64, z: f64, p: &SortParams) -> f64 {
    p.k_x * cell_index(y, p.r_y)
        + p.k_y * cell_index(x, p.r_x)
        + p.k_z * cell_index(z, p.r_z)
        + p.k_rho * x.hypot(y)
}

/// Scores the unrotated point the way the full scorer scores it after a
/// quarter turn (`(x, y) -> (-y, x)`): the swapped scorer with y walked in
/// descending order. Identical to the rotated full score when `r_x == r_y`.
#[inline]
pub fn quarter_turn_score(x: f64, y: f64, z: f64, p: &SortParams) -> f64 {
    score_swapped(x, -y, z, p)
}

#[derive(Debug, Clone)]
pub struct View {
    pub angle: f64,
    /// The cloud rotated by `angle`.
    pub cloud: PointCloud,
    pub perm: Permutation,
}

/// One rotated copy and ordering per angle, all over the same points.
#[derive(Debug, Clone)]
pub struct ViewSet {
    params: SortParams,
    views: Vec<View>,
}

impl ViewSet {
    pub fn params(&self) -> &SortParams {
        &self.params
    }

    pub fn views(&self) -> &[View] {
        &self.views
    }

    pub fn angles(&self) -> Vec<f64> {
        self.views.iter().map(|v| v.angle).collect()
    }

    pub fn len(&self) -> usize {
        self.views.len()
    }

    pub fn is_empty(&self) -> bool {
        self.views.is_empty()
    }

    /// Point count shared by every view.
    pub fn n_points(&self) -> usize {
        self.views.first().map_or(0, |v| v.perm.len())
    }

    pub fn permutations(&self) -> impl Iterator<Item = &Permutation> {
        self.views.iter().map(|v| &v.perm)
    }
}

pub fn build_views(cloud: &PointCloud, angles: &[f64], params: &SortParams) -> Result<ViewSet> {
    build_views_with(cloud, angles, params, SortMode::Score, Execution::default())
}

/// Rotates, scores and sorts each angle independently (in parallel across
/// views when requested).
pub fn build_views_with(
    cloud: &PointCloud,
    angles: &[f64],
    params: &SortParams,
    mode: SortMode,
    exec: Execution,
) -> Result<ViewSet> {
    if angles.is_empty() {
        return Err(Error::invalid("at least one view angle is required"));
    }
    let views = exec::map_slice(exec, angles, |&angle| -> Result<View> {
        let rotated = rotate_z(cloud, angle)?;
        let perm = sort_cloud_with(&rotated, params, mode, exec)?;
        Ok(View {
            angle,
            cloud: rotated,
            perm,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(ViewSet {
        params: *params,
        views,
    })
}
