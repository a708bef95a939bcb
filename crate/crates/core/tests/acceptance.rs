// SPDX-License-Identifier: Apache-2.0

//! Exit criteria. Runs without the libtest harness so every criterion prints
//! its PASS/FAIL line even when it passes. Exits non-zero if any fail.

mod common;

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use common::*;
use pillar_sfc::cloud::{load_kitti_bin, load_labels, synth_scene, write_kitti_bin, write_labels};
use pillar_sfc::neighbors::{encode_nee, fuse_sequences, sequence_neighbors, FeatureBlock};
use pillar_sfc::oracle::{knn_bruteforce, knn_bruteforce_with, locality_report, GridIndex};
use pillar_sfc::sfc::{
    precision_check, score_all, sort_by_scores, sort_cloud, sort_cloud_with, validate_params,
    SortMode,
};
use pillar_sfc::views::{build_views, quarter_turn_score, rotate_z, DEFAULT_ANGLES};
use pillar_sfc::{Execution, Permutation, PointCloud, Roi, SceneSpec, SortParams};
use rand::Rng;

fn report(id: u32, name: &str, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {id:>2} ({name}): {detail}");
}

fn kitti_roi() -> Roi {
    Roi::new([-50.0, 50.0], [-50.0, 50.0], [-4.0, 10.0]).unwrap()
}

fn c01_cell_ordering() -> bool {
    let p = SortParams::full();
    assert!(validate_params(&p, &kitti_roi()).unwrap().is_ok());
    let mut rng = rng(101);
    let mut violations = 0usize;
    let mut resort_mismatch = 0usize;
    let clouds = 120;
    for c in 0..clouds {
        let n = rng.random_range(1..=1000);
        let mut cloud = uniform_cloud(&mut rng, n, KITTI_LO, KITTI_HI);
        if c % 4 == 0 {
            // stack many points into a few pillars, some on exact half-cell boundaries
            let pts: Vec<[f64; 3]> = (0..n)
                .map(|i| {
                    let half = (i % 7) as f64 + 0.5;
                    [
                        half / p.r_x,
                        (i % 3) as f64 / p.r_y,
                        rng.random_range(-4.0..10.0),
                    ]
                })
                .collect();
            cloud = PointCloud::from_points(&pts).unwrap();
        }
        let perm = sort_cloud(&cloud, &p).unwrap();
        let cells = |i: usize| {
            let q = cloud.point(i);
            [
                oracle_cell(q[0], p.r_x),
                oracle_cell(q[1], p.r_y),
                oracle_cell(q[2], p.r_z),
            ]
        };
        violations += perm
            .order()
            .windows(2)
            .filter(|w| cells(w[0]) > cells(w[1]))
            .count();
        // brute-force re-sort on the cell tuples alone
        let mut resort: Vec<usize> = (0..n).collect();
        resort.sort_by_key(|&i| cells(i));
        let got: Vec<[i64; 3]> = perm.order().iter().map(|&i| cells(i)).collect();
        let want: Vec<[i64; 3]> = resort.iter().map(|&i| cells(i)).collect();
        resort_mismatch += got.iter().zip(&want).filter(|(a, b)| a != b).count();
    }
    let pass = violations == 0 && resort_mismatch == 0;
    report(
        1,
        "cell ordering",
        pass,
        format!(
            "{clouds} clouds, {violations} order violations, {resort_mismatch} re-sort mismatches"
        ),
    );
    pass
}

fn c02_dominance_condition_fidelity() -> bool {
    let mut rng = rng(202);
    let trials = 200;
    let mut wrong = 0;
    for _ in 0..trials {
        let y0 = rng.random_range(-100.0..100.0);
        let y1 = y0 + rng.random_range(0.01..200.0);
        let x0 = rng.random_range(-100.0..100.0);
        let roi = Roi::new([x0, x0 + 10.0], [y0, y1], [0.0, 1.0]).unwrap();
        let r_x = rng.random_range(0.1..5.0);
        let bound = (y1 - y0) * r_x;
        let at = validate_params(&SortParams::simple2d(bound, r_x), &roi).unwrap();
        let above =
            validate_params(&SortParams::simple2d(bound * (1.0 + 1e-9), r_x), &roi).unwrap();
        if at.is_ok() || !above.is_ok() {
            wrong += 1;
        }
    }
    let pass = wrong == 0;
    report(
        2,
        "dominance condition",
        pass,
        format!("{trials} random rois, {wrong} wrong verdicts"),
    );
    pass
}

fn c03_quarter_turn_equivalence() -> bool {
    let p = SortParams::full();
    assert_eq!(p.r_x, p.r_y);
    let mut rng = rng(303);
    let clouds = 120;
    let mut mismatched_clouds = 0;
    let mut mismatched_positions = 0;
    for _ in 0..clouds {
        let mut pts = Vec::new();
        while pts.len() < 200 {
            let q = [0, 1, 2].map(|a| rng.random_range(KITTI_LO[a]..KITTI_HI[a]));
            // away from every cell boundary in both frames
            let clear = [(q[0], p.r_x), (q[1], p.r_y), (q[2], p.r_z)]
                .iter()
                .all(|&(v, r)| boundary_gap(v, r) > 1e-9 * r + 1e-12);
            if clear {
                pts.push(q);
            }
        }
        let cloud = PointCloud::from_points(&pts).unwrap();
        let rotated = rotate_z(&cloud, FRAC_PI_2).unwrap();
        let rot_ok = (0..rotated.len()).all(|i| {
            let q = rotated.point(i);
            boundary_gap(q[0], p.r_x) > 1e-9 && boundary_gap(q[1], p.r_y) > 1e-9
        });
        assert!(rot_ok, "construction left a rotated point on a boundary");
        let by_rotation = sort_cloud(&rotated, &p).unwrap();
        let scores: Vec<f64> = pts
            .iter()
            .map(|q| quarter_turn_score(q[0], q[1], q[2], &p))
            .collect();
        let by_swap = sort_by_scores(&scores, Execution::Sequential);
        let diff = by_rotation
            .order()
            .iter()
            .zip(by_swap.order())
            .filter(|(a, b)| a != b)
            .count();
        if diff > 0 {
            mismatched_clouds += 1;
            mismatched_positions += diff;
        }
    }
    let pass = mismatched_clouds == 0;
    report(
        3,
        "quarter-turn equivalence",
        pass,
        format!(
            "{clouds} clouds, {mismatched_clouds} mismatched ({mismatched_positions} positions)"
        ),
    );
    pass
}

fn c04_precision_guard() -> bool {
    let p = SortParams::full();
    let mut rng = rng(404);
    let cloud = uniform_cloud(&mut rng, 100_000, KITTI_LO, KITTI_HI);
    let float = sort_cloud_with(&cloud, &p, SortMode::Score, Execution::default()).unwrap();
    let exact = sort_cloud_with(&cloud, &p, SortMode::ExactKey, Execution::default()).unwrap();
    let mismatches = float
        .order()
        .iter()
        .zip(exact.order())
        .filter(|(a, b)| a != b)
        .count();
    // do the two orders at least agree voxel by voxel?
    let voxel = |i: usize| p.key(cloud.x()[i], cloud.y()[i], cloud.z()[i]).cells;
    let voxel_mismatches = float
        .order()
        .iter()
        .zip(exact.order())
        .filter(|(&a, &b)| voxel(a) != voxel(b))
        .count();
    let pc = precision_check(&p, &kitti_roi()).unwrap();
    let pass = mismatches == 0 && voxel_mismatches == 0;
    report(
        4,
        "precision guard",
        pass,
        format!(
            "n=100000, {mismatches} mismatched positions ({voxel_mismatches} across voxels); \
             score ulp {:.3e} at |score| {:.3e} resolves rho only to {:.2} m",
            pc.score_ulp, pc.max_abs_score, pc.rho_resolution
        ),
    );
    pass
}

fn c05_oracle_equivalence() -> bool {
    let mut rng = rng(505);
    let clouds = 110;
    let mut mismatched = 0;
    for c in 0..clouds {
        let n = rng.random_range(20..=2000);
        let cloud = match c % 4 {
            0 => uniform_cloud(&mut rng, n, KITTI_LO, KITTI_HI),
            1 => uniform_cloud(&mut rng, n, [-1.0, -1.0, 0.0], [1.0, 1.0, 0.0001]),
            2 => {
                // integer lattice: many exact distance ties
                let pts: Vec<[f64; 3]> = (0..n)
                    .map(|_| [0, 1, 2].map(|_| rng.random_range(0..6) as f64))
                    .collect();
                PointCloud::from_points(&pts).unwrap()
            }
            _ => {
                let spec = SceneSpec::scattered(10.0, 5, n / 10 + 1, n / 2, 0.02, c).unwrap();
                synth_scene(&spec, c).unwrap()
            }
        };
        let k = [1, 8, 16][c as usize % 3].min(cloud.len() - 1);
        let brute = knn_bruteforce(&cloud, k).unwrap();
        let grid = GridIndex::build(&cloud).unwrap().knn(k).unwrap();
        if brute != grid {
            mismatched += 1;
        }
    }
    let pass = mismatched == 0;
    report(
        5,
        "oracle equivalence",
        pass,
        format!("{clouds} clouds, {mismatched} grid/brute mismatches"),
    );
    pass
}

fn scene(seed: u64) -> PointCloud {
    let spec = SceneSpec::scattered(15.0, 10, 400, 2000, 0.02, seed).unwrap();
    synth_scene(&spec, seed).unwrap()
}

fn c06_ablation_direction() -> bool {
    let scenes = 20;
    let mut wins = 0;
    let mut gaps = Vec::new();
    for seed in 0..scenes {
        let cloud = scene(seed);
        let truth = GridIndex::build(&cloud).unwrap().knn(8).unwrap();
        let full = build_views(&cloud, &[0.0], &SortParams::full()).unwrap();
        let abl = build_views(&cloud, &[0.0], &SortParams::ablation()).unwrap();
        let rf = locality_report(&cloud, &full, &truth, Execution::default()).unwrap();
        let ra = locality_report(&cloud, &abl, &truth, Execution::default()).unwrap();
        if rf.label_purity > ra.label_purity {
            wins += 1;
        }
        gaps.push(rf.label_purity - ra.label_purity);
    }
    let rate = wins as f64 / scenes as f64;
    let mean_gap = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let pass = rate >= 0.95;
    report(
        6,
        "ablation direction",
        pass,
        format!("full > ablation purity on {wins}/{scenes} scenes, mean gap {mean_gap:.4}"),
    );
    pass
}

fn c07_multiview_expansion() -> bool {
    let p = SortParams::full();
    let mut all_ge = true;
    let mut clouds = 0;
    let mut strict = 0;
    let scenes = 20;
    let check = |cloud: &PointCloud| -> (f64, f64) {
        let truth = GridIndex::build(cloud).unwrap().knn(8).unwrap();
        let one = build_views(cloud, &[0.0], &p).unwrap();
        let four = build_views(cloud, &DEFAULT_ANGLES, &p).unwrap();
        let r1 = locality_report(cloud, &one, &truth, Execution::default())
            .unwrap()
            .recall_at_k;
        let r4 = locality_report(cloud, &four, &truth, Execution::default())
            .unwrap()
            .recall_at_k;
        (r1, r4)
    };
    for seed in 0..scenes {
        let (r1, r4) = check(&scene(seed));
        clouds += 1;
        all_ge &= r4 >= r1;
        if r4 > r1 {
            strict += 1;
        }
    }
    let mut rng = rng(707);
    for _ in 0..20 {
        let n = rng.random_range(20..1500);
        let (r1, r4) = check(
            &uniform_cloud(&mut rng, n, KITTI_LO, KITTI_HI)
                .with_labels(vec![0; n])
                .unwrap(),
        );
        clouds += 1;
        all_ge &= r4 >= r1;
    }
    let strict_rate = strict as f64 / scenes as f64;
    let pass = all_ge && strict_rate >= 0.8;
    report(
        7,
        "multi-view expansion",
        pass,
        format!("4-view >= 1-view recall@8 on all {clouds} clouds: {all_ge}; strictly greater on {strict}/{scenes} scenes"),
    );
    pass
}

fn c08_performance_envelope() -> bool {
    let p = SortParams::full();
    let mut rng = rng(808);
    let cloud = uniform_cloud(&mut rng, 100_000, KITTI_LO, KITTI_HI);
    let mut runs = Vec::new();
    for _ in 0..5 {
        let t0 = Instant::now();
        let scores = score_all(&cloud, &p, Execution::Sequential).unwrap();
        let perm = sort_by_scores(&scores, Execution::Sequential);
        runs.push(t0.elapsed().as_secs_f64());
        std::hint::black_box(perm);
    }
    runs.sort_by(f64::total_cmp);
    let sfc = runs[2];
    let t0 = Instant::now();
    let knn = knn_bruteforce_with(&cloud, 8, Execution::Sequential).unwrap();
    let knn_s = t0.elapsed().as_secs_f64();
    std::hint::black_box(knn);
    let speedup = knn_s / sfc;
    let pass = sfc <= 0.200 && speedup >= 10.0;
    report(
        8,
        "performance envelope",
        pass,
        format!(
            "score+sort 1e5 single-threaded {:.1} ms (budget 200), brute KNN {:.2} s, speedup {:.0}x (need 10x)",
            sfc * 1e3,
            knn_s,
            speedup
        ),
    );
    pass
}

fn c09_format_fidelity() -> bool {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rng(909);
    let n = 5000;
    let raw: Vec<[f32; 4]> = (0..n)
        .map(|_| {
            [
                rng.random_range(-80.0..80.0),
                rng.random_range(-80.0..80.0),
                rng.random_range(-5.0..5.0),
                rng.random_range(0.0..1.0),
            ]
        })
        .collect();
    let labels: Vec<u32> = (0..n).map(|_| rng.random::<u32>()).collect();
    let bin = dir.path().join("scan.bin");
    let lab = dir.path().join("scan.label");
    std::fs::write(
        &bin,
        raw.iter()
            .flat_map(|p| p.iter().flat_map(|v| v.to_le_bytes()))
            .collect::<Vec<u8>>(),
    )
    .unwrap();
    std::fs::write(
        &lab,
        labels
            .iter()
            .flat_map(|v| v.to_le_bytes())
            .collect::<Vec<u8>>(),
    )
    .unwrap();

    let cloud = load_labels(&lab, load_kitti_bin(&bin).unwrap()).unwrap();
    let values_exact = (0..n).all(|i| {
        let q = cloud.point(i);
        (0..3).all(|a| (q[a] as f32).to_bits() == raw[i][a].to_bits())
            && cloud.intensity().unwrap()[i].to_bits() == raw[i][3].to_bits()
            && cloud.labels().unwrap()[i] == (labels[i] & 0xFFFF) as u16
    });
    let bin2 = dir.path().join("again.bin");
    let lab2 = dir.path().join("again.label");
    write_kitti_bin(&bin2, &cloud).unwrap();
    write_labels(&lab2, cloud.labels().unwrap()).unwrap();
    let bytes_exact = std::fs::read(&bin).unwrap() == std::fs::read(&bin2).unwrap();
    let reread = load_labels(&lab2, load_kitti_bin(&bin2).unwrap()).unwrap();
    let reread_exact = reread == cloud;

    // a real scan, when one is provided
    let real = std::env::var_os("SEMANTIC_KITTI_SCAN").map(std::path::PathBuf::from);
    let real_detail = match &real {
        Some(path) => {
            let size = std::fs::metadata(path).unwrap().len() as usize;
            let c = load_kitti_bin(path).unwrap();
            assert_eq!(c.len(), size / 16);
            let n_real = c.len();
            let label_path = path.with_extension("label");
            let label_path = std::env::var_os("SEMANTIC_KITTI_LABEL")
                .map(Into::into)
                .unwrap_or(label_path);
            if label_path.exists() {
                let c = load_labels(&label_path, c).unwrap();
                assert_eq!(c.labels().unwrap().len(), c.len());
            }
            format!("real scan {n_real} points")
        }
        None => "no real scan provided (set SEMANTIC_KITTI_SCAN)".to_string(),
    };
    let pass = values_exact && bytes_exact && reread_exact;
    report(
        9,
        "format fidelity",
        pass,
        format!("values exact {values_exact}, bytes exact {bytes_exact}, re-read exact {reread_exact}; {real_detail}"),
    );
    pass
}

fn c10_feature_contract() -> bool {
    let spec = SceneSpec::scattered(12.0, 6, 150, 600, 0.03, 10).unwrap();
    let cloud = synth_scene(&spec, 10).unwrap();
    let plain = cloud.select(&(0..cloud.len()).collect::<Vec<_>>());
    let no_intensity =
        PointCloud::new(plain.x().to_vec(), plain.y().to_vec(), plain.z().to_vec()).unwrap();
    let perm = sort_cloud(&cloud, &SortParams::full()).unwrap();

    let mut dims_ok = true;
    for k in [1, 4, 8, 16] {
        let t = sequence_neighbors(&perm, k).unwrap();
        dims_ok &= encode_nee(&cloud, &t).unwrap().dim() == 3 + 3 * k + 1;
        dims_ok &= encode_nee(&no_intensity, &t).unwrap().dim() == 3 + 3 * k;
    }

    let t = sequence_neighbors(&perm, 8).unwrap();
    let base = encode_nee(&cloud, &t).unwrap();
    let shift = [10.0, -5.0, 2.0];
    let moved = encode_nee(&cloud.translated(shift).unwrap(), &t).unwrap();
    let mut invariant = true;
    let mut equivariant = true;
    for i in 0..cloud.len() {
        invariant &= base.row(i)[3..27] == moved.row(i)[3..27];
        equivariant &= (0..3).all(|a| moved.row(i)[a] == base.row(i)[a] + shift[a]);
    }

    let seq = base.gather(&perm).unwrap();
    let blocks: Vec<FeatureBlock> = vec![seq.clone(); 4];
    let perms: Vec<&Permutation> = vec![&perm; 4];
    let fused = fuse_sequences(&perms, &blocks, Execution::default()).unwrap();
    let additive = fused
        .as_flat()
        .iter()
        .zip(base.as_flat())
        .all(|(f, b)| *f == 4.0 * b);

    let pass = dims_ok && invariant && equivariant && additive;
    report(
        10,
        "feature contract",
        pass,
        format!("dims {dims_ok}, offsets translation-invariant {invariant}, positions shift {equivariant}, 4 identical views = 4x {additive}"),
    );
    pass
}

type Criterion = (&'static str, fn() -> bool);

const CRITERIA: [Criterion; 10] = [
    ("c01_cell_ordering", c01_cell_ordering),
    (
        "c02_dominance_condition_fidelity",
        c02_dominance_condition_fidelity,
    ),
    ("c03_quarter_turn_equivalence", c03_quarter_turn_equivalence),
    ("c04_precision_guard", c04_precision_guard),
    ("c05_oracle_equivalence", c05_oracle_equivalence),
    ("c06_ablation_direction", c06_ablation_direction),
    ("c07_multiview_expansion", c07_multiview_expansion),
    ("c08_performance_envelope", c08_performance_envelope),
    ("c09_format_fidelity", c09_format_fidelity),
    ("c10_feature_contract", c10_feature_contract),
];

fn main() {
    // cargo forwards libtest flags; a bare word filters by name
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = Vec::new();
    let mut ran = 0;
    for (name, run) in CRITERIA {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        match std::panic::catch_unwind(run) {
            Ok(true) => {}
            Ok(false) => failed.push(name),
            Err(_) => {
                println!("[FAIL] {name}: panicked");
                failed.push(name);
            }
        }
    }
    println!(
        "acceptance: {} of {ran} criteria passed",
        ran - failed.len()
    );
    if !failed.is_empty() {
        println!("failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}
