// SPDX-License-Identifier: Apache-2.0

//! Hierarchical cell scoring and the sorted permutations built from it.
//!
//! A point's score is a weighted sum of its rounded cell indices in priority
//! order plus a small radius term. With the default weights the sequence
//! walks pillar by pillar in x, then y, and within each pillar climbs through
//! the z voxels.

mod params;
mod perm;
mod score;
mod sort;
mod validate;

pub use params::{Axis, Roi, SortParams, Variant};
pub use perm::{invert, Permutation};
pub use score::{cell_index, score_ablation, score_full, score_simple2d, CellKey};
pub use sort::{
    composite_keys, score_all, sort_by_keys, sort_by_scores, sort_cloud, sort_cloud_with, SortMode,
};
pub use validate::{
    dominance_checks, precision_check, validate_params, LevelCheck, PrecisionCheck, Validity,
};
