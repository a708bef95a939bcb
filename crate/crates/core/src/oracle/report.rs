// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::metrics::{label_purity, mean_neighbor_distance, pooled_neighbors, recall_at_k};
use crate::exec::Execution;
use crate::neighbors::{sequence_neighbors_with, NeighborTable};
use crate::views::ViewSet;
use crate::{Error, PointCloud, Result, SortParams, Variant};

/// How the candidate neighbors of a report were formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateKind {
    /// Sequence neighbors of a single view.
    Sequence,
    /// Every view's sequence neighbors pooled, then the k nearest kept.
    Pooled,
}

/// Locality of one ordering configuration against exact KNN. These are
/// proxies for how well the sequence keeps 3D neighborhoods, not accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalityReport {
    pub recall_at_k: f64,
    pub mean_neighbor_distance: f64,
    pub label_purity: f64,
    pub k: usize,
    pub n: usize,
    pub variant: Variant,
    pub angles: Vec<f64>,
    pub params: SortParams,
    pub candidate: CandidateKind,
}

/// Scores the view set's neighbors against the exact table `truth`.
pub fn locality_report(
    cloud: &PointCloud,
    views: &ViewSet,
    truth: &NeighborTable,
    exec: Execution,
) -> Result<LocalityReport> {
    if views.n_points() != cloud.len() || truth.len() != cloud.len() {
        return Err(Error::invalid(format!(
            "views over {} points and truth over {} points for a cloud of {}",
            views.n_points(),
            truth.len(),
            cloud.len()
        )));
    }
    let k = truth.k();
    let tables = views
        .permutations()
        .map(|p| sequence_neighbors_with(p, k, exec))
        .collect::<Result<Vec<_>>>()?;
    let (candidate, kind) = if tables.len() == 1 {
        (tables.into_iter().next().unwrap(), CandidateKind::Sequence)
    } else {
        (
            pooled_neighbors(cloud, &tables, k, exec)?,
            CandidateKind::Pooled,
        )
    };
    Ok(LocalityReport {
        recall_at_k: recall_at_k(&candidate, truth)?,
        mean_neighbor_distance: mean_neighbor_distance(cloud, &candidate)?,
        label_purity: label_purity(&candidate, cloud.labels())?,
        k,
        n: cloud.len(),
        variant: views.params().variant,
        angles: views.angles(),
        params: *views.params(),
        candidate: kind,
    })
}
