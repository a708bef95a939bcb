// SPDX-License-Identifier: Apache-2.0

//! Ground truth for the sequence ordering: exact Euclidean KNN and the
//! locality metrics that compare sequence neighbors against it.

mod knn;
mod metrics;
mod report;

pub use knn::{knn_bruteforce, knn_bruteforce_with, sq_dist, GridIndex};
pub use metrics::{label_purity, mean_neighbor_distance, pooled_neighbors, recall_at_k};
pub use report::{locality_report, CandidateKind, LocalityReport};
