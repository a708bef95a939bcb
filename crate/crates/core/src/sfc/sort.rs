// SPDX-License-Identifier: Apache-2.0

use super::{CellKey, Permutation, SortParams};
use crate::exec::{self, Execution};
use crate::{Error, PointCloud, Result};

/// How points are compared when sorting.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortMode {
    /// Ascending 64-bit score, ties by original index.
    #[default]
    Score,
    /// Lexicographic integer cells then the tail term, ties by original index.
    ExactKey,
}

/// One score per point, in point order. A single pass over the cloud.
pub fn score_all(cloud: &PointCloud, params: &SortParams, exec: Execution) -> Result<Vec<f64>> {
    let (x, y, z) = (cloud.x(), cloud.y(), cloud.z());
    let scores = exec::map_range(exec, cloud.len(), |i| params.score(x[i], y[i], z[i]));
    if let Some(index) = scores.iter().position(|s| !s.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(scores)
}

pub fn composite_keys(cloud: &PointCloud, params: &SortParams, exec: Execution) -> Vec<CellKey> {
    let (x, y, z) = (cloud.x(), cloud.y(), cloud.z());
    exec::map_range(exec, cloud.len(), |i| params.key(x[i], y[i], z[i]))
}

/// Ascending by score, ties broken by index.
pub fn sort_by_scores(scores: &[f64], exec: Execution) -> Permutation {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    exec::sort_unstable_by(exec, &mut idx, |&a, &b| {
        scores[a].total_cmp(&scores[b]).then(a.cmp(&b))
    });
    Permutation::from_order_unchecked(idx)
}

pub fn sort_by_keys(keys: &[CellKey], exec: Execution) -> Permutation {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    exec::sort_unstable_by(exec, &mut idx, |&a, &b| {
        keys[a].cmp_total(&keys[b]).then(a.cmp(&b))
    });
    Permutation::from_order_unchecked(idx)
}

/// Sorts by score with the default execution.
pub fn sort_cloud(cloud: &PointCloud, params: &SortParams) -> Result<Permutation> {
    sort_cloud_with(cloud, params, SortMode::Score, Execution::default())
}

pub fn sort_cloud_with(
    cloud: &PointCloud,
    params: &SortParams,
    mode: SortMode,
    exec: Execution,
) -> Result<Permutation> {
    match mode {
        SortMode::Score => Ok(sort_by_scores(&score_all(cloud, params, exec)?, exec)),
        SortMode::ExactKey => Ok(sort_by_keys(&composite_keys(cloud, params, exec), exec)),
    }
}
