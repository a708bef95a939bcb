// SPDX-License-Identifier: Apache-2.0

//! Test-only generators and independent oracles. Nothing here calls the
//! library code paths it is used to check.

#![allow(dead_code)]

use pillar_sfc::PointCloud;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform points in a box, rounded to f32 like real scans.
pub fn uniform_cloud(rng: &mut ChaCha8Rng, n: usize, lo: [f64; 3], hi: [f64; 3]) -> PointCloud {
    let pts: Vec<[f64; 3]> = (0..n)
        .map(|_| [0, 1, 2].map(|a| rng.random_range(lo[a]..hi[a]) as f32 as f64))
        .collect();
    PointCloud::from_points(&pts).unwrap()
}

pub const KITTI_LO: [f64; 3] = [-50.0, -50.0, -4.0];
pub const KITTI_HI: [f64; 3] = [50.0, 50.0, 10.0];

/// Independent cell index: nearest integer, halves away from zero.
pub fn oracle_cell(v: f64, r: f64) -> i64 {
    let t = v * r;
    let f = t.floor();
    let frac = t - f;
    let up = if frac > 0.5 {
        true
    } else if frac < 0.5 {
        false
    } else {
        t > 0.0
    };
    (if up { f + 1.0 } else { f }) as i64
}

/// Distance of `v * r` from the nearest rounding boundary (k + 0.5).
pub fn boundary_gap(v: f64, r: f64) -> f64 {
    let t = v * r;
    (t - t.floor() - 0.5).abs()
}

/// Plain O(n^2) KNN with a full sort per query, ties by lower index.
pub fn oracle_knn(points: &[[f64; 3]], k: usize) -> Vec<Vec<usize>> {
    (0..points.len())
        .map(|i| {
            let mut c: Vec<(f64, usize)> = (0..points.len())
                .filter(|&j| j != i)
                .map(|j| {
                    let d: f64 = (0..3).map(|a| (points[i][a] - points[j][a]).powi(2)).sum();
                    (d, j)
                })
                .collect();
            c.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            c.into_iter().take(k).map(|(_, j)| j).collect()
        })
        .collect()
}

pub fn points_of(cloud: &PointCloud) -> Vec<[f64; 3]> {
    (0..cloud.len()).map(|i| cloud.point(i)).collect()
}
