// SPDX-License-Identifier: Apache-2.0

//! Space-filling-curve ordering for large LiDAR point clouds.
//!
//! Points are scored with a hierarchical cell score (x pillar, y pillar,
//! z voxel, then radius), sorted into a 1D sequence, and the sequence order
//! stands in for a K-nearest-neighbor search. The crate covers:
//!
//! - [`cloud`]: SemanticKITTI `.bin`/`.label` IO, sampling, synthetic scenes
//! - [`sfc`]: scorers, dominance validation, permutations and sorting
//! - [`views`]: z-rotation views and the quarter-turn axis-swap scorer
//! - [`neighbors`]: sequence neighbors, neighbor-offset features, view fusion
//! - [`oracle`]: exact KNN and locality metrics for the 1D ordering
//! - [`pipeline`]: benchmark and locality runs driven by a [`pipeline::RunConfig`]
//!
//! Data-parallel loops run on rayon when the `parallel` feature is enabled
//! (the default). Every hot kernel also takes an [`Execution`] so the
//! sequential path stays available for comparison.

pub mod cloud;
mod error;
mod exec;
pub mod export;
pub mod neighbors;
pub mod oracle;
pub mod pipeline;
pub mod sfc;
pub mod views;

pub use cloud::{PointCloud, SceneSpec};
pub use error::{Error, Result};
pub use exec::Execution;
pub use neighbors::{FeatureBlock, NeighborTable};
pub use oracle::LocalityReport;
pub use sfc::{Permutation, Roi, SortParams, Variant};
pub use views::ViewSet;
