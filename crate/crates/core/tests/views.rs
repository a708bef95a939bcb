// SPDX-License-Identifier: Apache-2.0

mod common;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use common::{boundary_gap, rng, uniform_cloud, KITTI_HI, KITTI_LO};
use pillar_sfc::neighbors::{encode_nee, fuse_views, multiview_features, sequence_neighbors};
use pillar_sfc::sfc::{score_full, sort_by_scores, sort_cloud};
use pillar_sfc::views::{build_views, rotate_z, score_swapped, DEFAULT_ANGLES};
use pillar_sfc::{Execution, FeatureBlock, PointCloud, SortParams};
use rand::Rng;

#[test]
fn single_zero_view_is_the_plain_sort() {
    let mut r = rng(1);
    let cloud = uniform_cloud(&mut r, 500, KITTI_LO, KITTI_HI);
    let p = SortParams::full();
    let set = build_views(&cloud, &[0.0], &p).unwrap();
    assert_eq!(set.views()[0].perm, sort_cloud(&cloud, &p).unwrap());
    assert_eq!(set.views()[0].cloud, cloud);

    let four = build_views(&cloud, &DEFAULT_ANGLES, &p).unwrap();
    assert_eq!(four.len(), 4);
    assert!(four.permutations().all(|perm| perm.len() == 500));
}

/// Pillar populations: for each visited (x, y) cell, how many points it holds.
fn pillar_census(cloud: &PointCloud, order: &[usize], p: &SortParams) -> Vec<usize> {
    let mut counts = BTreeMap::new();
    for &i in order {
        let q = cloud.point(i);
        let key = ((q[0] * p.r_x).round() as i64, (q[1] * p.r_y).round() as i64);
        *counts.entry(key).or_insert(0usize) += 1;
    }
    let mut v: Vec<usize> = counts.into_values().collect();
    v.sort_unstable();
    v
}

#[test]
fn quarter_turn_of_symmetric_cloud_keeps_pillar_census() {
    // 4-fold symmetric by construction: every point appears with its exact
    // quarter-turn images (x, y) -> (-y, x), generated by swaps and negation.
    let mut r = rng(2);
    let mut pts = Vec::new();
    for _ in 0..150 {
        let (x, y, z) = (
            r.random_range(-20.0f64..20.0),
            r.random_range(-20.0f64..20.0),
            r.random_range(0.0f64..3.0),
        );
        let p = SortParams::full();
        if boundary_gap(x, p.r_x) < 1e-6 || boundary_gap(y, p.r_y) < 1e-6 {
            continue;
        }
        let copies = r.random_range(1..4);
        for _ in 0..copies {
            pts.extend([[x, y, z], [-y, x, z], [-x, -y, z], [y, -x, z]]);
        }
    }
    let cloud = PointCloud::from_points(&pts).unwrap();
    let p = SortParams::full();
    let set = build_views(&cloud, &[0.0, FRAC_PI_2], &p).unwrap();
    let census: Vec<Vec<usize>> = set
        .views()
        .iter()
        .map(|v| pillar_census(&v.cloud, v.perm.order(), &p))
        .collect();
    assert_eq!(census[0], census[1]);
    assert!(
        census[0].iter().any(|&c| c > 4),
        "census should be non-trivial"
    );
}

#[test]
fn swapped_scorer_matches_negative_quarter_turn() {
    // (x, y) -> (y, -x) under the full scorer equals the swapped scorer with
    // x mirrored: score_full(y, -x, z) = score_swapped(-x, y, z).
    let p = SortParams::full();
    let mut r = rng(3);
    for _ in 0..100 {
        let mut pts = Vec::new();
        while pts.len() < 200 {
            let q = [
                r.random_range(-50.0f64..50.0),
                r.random_range(-50.0f64..50.0),
                r.random_range(-4.0f64..10.0),
            ];
            if boundary_gap(q[0], p.r_x) > 1e-9
                && boundary_gap(q[1], p.r_y) > 1e-9
                && boundary_gap(q[2], p.r_z) > 1e-9
            {
                pts.push(q);
            }
        }
        let cloud = PointCloud::from_points(&pts).unwrap();
        let rotated = rotate_z(&cloud, -FRAC_PI_2).unwrap();
        let by_rotation = sort_cloud(&rotated, &p).unwrap();
        let swapped: Vec<f64> = pts
            .iter()
            .map(|q| score_swapped(-q[0], q[1], q[2], &p))
            .collect();
        assert_eq!(by_rotation, sort_by_scores(&swapped, Execution::Sequential));
    }
    assert_eq!(
        score_swapped(2.0, 1.0, 0.5, &p),
        score_full(1.0, 2.0, 0.5, &p)
    );
}

#[test]
fn fusion_scatters_through_each_inverse() {
    let cloud =
        PointCloud::from_points(&[[0.0, 0.0, 0.0], [5.0, 0.0, 0.0], [0.0, 5.0, 0.0]]).unwrap();
    let p = SortParams::full();
    let set = build_views(&cloud, &[0.0, FRAC_PI_2], &p).unwrap();
    assert_ne!(set.views()[0].perm, set.views()[1].perm);
    let blocks: Vec<FeatureBlock> = (0..2)
        .map(|v| {
            FeatureBlock::new(
                vec!["f".into()],
                (0..3).map(|s| (10 * v + s) as f64).collect(),
            )
            .unwrap()
        })
        .collect();
    let fused = fuse_views(&set, &blocks).unwrap();
    for i in 0..3 {
        let want: f64 = (0..2)
            .map(|v| blocks[v].row(set.views()[v].perm.position_of(i))[0])
            .sum();
        assert_eq!(fused.row(i)[0], want);
    }
}

#[test]
fn multiview_features_sum_per_view_encodings() {
    let mut r = rng(4);
    let cloud = uniform_cloud(&mut r, 300, KITTI_LO, KITTI_HI)
        .with_intensity(vec![0.25; 300])
        .unwrap();
    let p = SortParams::full();
    let set = build_views(&cloud, &DEFAULT_ANGLES, &p).unwrap();
    let fused = multiview_features(&set, 8, Execution::default()).unwrap();
    assert_eq!(fused.dim(), 28);
    let mut want = vec![0.0; 300 * 28];
    for v in set.views() {
        let t = sequence_neighbors(&v.perm, 8).unwrap();
        let block = encode_nee(&v.cloud, &t).unwrap();
        for (w, b) in want.iter_mut().zip(block.as_flat()) {
            *w += b;
        }
    }
    assert_eq!(fused.as_flat(), &want[..]);
}
