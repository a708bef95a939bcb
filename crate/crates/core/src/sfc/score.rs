// SPDX-License-Identifier: Apache-2.0

use std::cmp::Ordering;

use super::{Axis, SortParams, Variant};

/// Cell index along one axis: `round(v * r)`, halves rounded away from zero.
#[inline]
pub fn cell_index(v: f64, rate: f64) -> f64 {
    (v * rate).round()
}

/// `k_x * round(x * r_x) + y`.
#[inline]
pub fn score_simple2d(x: f64, y: f64, k_x: f64, r_x: f64) -> f64 {
    k_x * cell_index(x, r_x) + y
}

/// x pillar, y pillar, z voxel, then radius.
#[inline]
pub fn score_full(x: f64, y: f64, z: f64, p: &SortParams) -> f64 {
    p.k_x * cell_index(x, p.r_x)
        + p.k_y * cell_index(y, p.r_y)
        + p.k_z * cell_index(z, p.r_z)
        + p.k_rho * x.hypot(y)
}

/// z slab, x cell, y cell, then radius.
#[inline]
pub fn score_ablation(x: f64, y: f64, z: f64, p: &SortParams) -> f64 {
    p.k_z * cell_index(z, p.r_z)
        + p.k_x * cell_index(x, p.r_x)
        + p.k_y * cell_index(y, p.r_y)
        + p.k_rho * x.hypot(y)
}

/// Exact lexicographic form of a score: integer cells in priority order,
/// then the tail term (radius, or raw y for `Simple2d`).
///
/// Comparing keys gives the ordering the floating-point score is meant to
/// produce when the dominance condition holds, without any rounding of the
/// sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellKey {
    pub cells: [i64; 3],
    pub tail: f64,
}

impl CellKey {
    #[inline]
    pub fn cmp_total(&self, other: &Self) -> Ordering {
        self.cells
            .cmp(&other.cells)
            .then_with(|| self.tail.total_cmp(&other.tail))
    }
}

impl SortParams {
    /// Score of one point under this parameter set's variant.
    #[inline]
    pub fn score(&self, x: f64, y: f64, z: f64) -> f64 {
        match self.variant {
            Variant::Full => score_full(x, y, z, self),
            Variant::Ablation => score_ablation(x, y, z, self),
            Variant::Simple2d => score_simple2d(x, y, self.k_x, self.r_x),
        }
    }

    #[inline]
    pub fn key(&self, x: f64, y: f64, z: f64) -> CellKey {
        let coord = |a: Axis| match a {
            Axis::X => x,
            Axis::Y => y,
            Axis::Z => z,
        };
        let mut cells = [0i64; 3];
        for (slot, &a) in cells.iter_mut().zip(self.variant.priority()) {
            *slot = cell_index(coord(a), self.rate(a)) as i64;
        }
        let tail = match self.variant {
            Variant::Simple2d => y,
            _ => x.hypot(y),
        };
        CellKey { cells, tail }
    }
}
