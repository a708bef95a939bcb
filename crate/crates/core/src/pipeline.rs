// SPDX-License-Identifier: Apache-2.0

//! End-to-end runs: load or synthesize a cloud, then time the pipeline
//! stages or measure locality for a set of ordering configurations.

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cloud::{load_kitti_bin, load_labels, read_kitti_bin, sample_points, synth_scene};
use crate::exec::Execution;
use crate::neighbors::{encode_nee_with, sequence_neighbors_with};
use crate::oracle::{knn_bruteforce_with, locality_report, GridIndex};
use crate::sfc::{score_all, sort_by_scores};
use crate::views::{build_views_with, DEFAULT_ANGLES};
use crate::{Error, LocalityReport, PointCloud, Result, SceneSpec, SortParams, Variant};

pub const DEFAULT_K: usize = 8;
pub const DEFAULT_SAMPLE: usize = 100_000;
pub const MIN_REPEATS: usize = 5;

#[derive(Debug, Clone)]
pub enum InputSource {
    Kitti {
        bin: PathBuf,
        labels: Option<PathBuf>,
    },
    Synthetic(SceneSpec),
    /// A `.bin` scan on standard input.
    Stdin,
    InMemory(PointCloud),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: InputSource,
    pub params: SortParams,
    /// Views for feature extraction.
    pub angles: Vec<f64>,
    pub k: usize,
    pub sample: usize,
    pub seed: u64,
    pub exec: Execution,
    /// Timed runs per benchmark stage; the median is reported.
    pub repeats: usize,
    /// Scorer variants compared by [`run_locality`].
    pub variants: Vec<Variant>,
    /// Angle sets compared by [`run_locality`].
    pub view_sets: Vec<Vec<f64>>,
}

impl RunConfig {
    pub fn new(input: InputSource) -> Self {
        RunConfig {
            input,
            params: SortParams::full(),
            angles: DEFAULT_ANGLES.to_vec(),
            k: DEFAULT_K,
            sample: DEFAULT_SAMPLE,
            seed: 0,
            exec: Execution::default(),
            repeats: MIN_REPEATS,
            variants: vec![Variant::Full, Variant::Ablation],
            view_sets: vec![vec![0.0], DEFAULT_ANGLES.to_vec()],
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if self.sample == 0 {
            return Err(Error::invalid("sample target must be at least 1"));
        }
        if self.angles.is_empty() {
            return Err(Error::invalid("at least one view angle is required"));
        }
        if self.view_sets.iter().any(|v| v.is_empty()) {
            return Err(Error::invalid("empty angle set in view_sets"));
        }
        self.params.check()
    }

    /// `params` when it already targets `variant`, otherwise that variant's preset.
    pub fn params_for(&self, variant: Variant) -> SortParams {
        if self.params.variant == variant {
            self.params
        } else {
            SortParams::preset(variant)
        }
    }
}

/// Loads the configured source and samples it down to `config.sample`.
pub fn load_input(config: &RunConfig) -> Result<PointCloud> {
    let cloud = match &config.input {
        InputSource::Kitti { bin, labels } => {
            let cloud = load_kitti_bin(bin)?;
            match labels {
                Some(l) => load_labels(l, cloud)?,
                None => cloud,
            }
        }
        InputSource::Synthetic(spec) => synth_scene(spec, config.seed)?,
        InputSource::Stdin => read_kitti_bin(std::io::stdin().lock(), "<stdin>")?,
        InputSource::InMemory(c) => c.clone(),
    };
    sample_points(&cloud, config.sample, config.seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub median_seconds: f64,
    pub points_per_second: f64,
    /// Calls averaged inside each timed run; more than 1 for sub-window stages.
    pub iterations: usize,
    /// Mean seconds per call, one entry per run.
    pub runs_seconds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub n: usize,
    pub k: usize,
    pub repeats: usize,
    pub seed: u64,
    pub parallel: bool,
    pub threads: usize,
    pub params: SortParams,
    pub stages: Vec<StageTiming>,
}

impl BenchReport {
    pub fn stage(&self, name: &str) -> Option<&StageTiming> {
        self.stages.iter().find(|s| s.stage == name)
    }
}

pub const STAGES: [&str; 5] = ["scoring", "sorting", "neighbors", "nee", "knn_bruteforce"];

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Shortest wall time a single timed run may cover. Faster stages repeat
/// the call inside the run and report the mean.
const MIN_RUN_SECONDS: f64 = 0.02;

/// Runs `f` `repeats` times, timing only the calls themselves.
fn time_stage<T>(
    name: &str,
    n: usize,
    repeats: usize,
    mut f: impl FnMut() -> Result<T>,
) -> Result<(StageTiming, T)> {
    let t0 = Instant::now();
    let mut last = std::hint::black_box(f()?);
    let first = t0.elapsed().as_secs_f64();
    let iterations = if first >= MIN_RUN_SECONDS {
        1
    } else {
        ((MIN_RUN_SECONDS / first.max(1e-9)).ceil() as usize).min(1_000_000)
    };
    let mut runs = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let t0 = Instant::now();
        for _ in 0..iterations {
            last = std::hint::black_box(f()?);
        }
        runs.push(t0.elapsed().as_secs_f64() / iterations as f64);
    }
    let med = median(runs.clone());
    Ok((
        StageTiming {
            stage: name.to_string(),
            median_seconds: med,
            points_per_second: if med > 0.0 {
                n as f64 / med
            } else {
                f64::INFINITY
            },
            iterations,
            runs_seconds: runs,
        },
        last,
    ))
}

/// Times scoring, sorting, sequence-neighbor gathering, feature encoding and
/// brute-force KNN on the loaded cloud. File IO is outside every timer.
pub fn run_benchmark(config: &RunConfig) -> Result<BenchReport> {
    config.check()?;
    let cloud = load_input(config)?;
    benchmark_cloud(&cloud, config)
}

pub fn benchmark_cloud(cloud: &PointCloud, config: &RunConfig) -> Result<BenchReport> {
    config.check()?;
    if config.repeats < MIN_REPEATS {
        return Err(Error::invalid(format!(
            "benchmark needs at least {MIN_REPEATS} repeats, got {}",
            config.repeats
        )));
    }
    let (n, r, exec) = (cloud.len(), config.repeats, config.exec);
    let params = &config.params;
    let (scoring, scores) = time_stage("scoring", n, r, || score_all(cloud, params, exec))?;
    let (sorting, perm) = time_stage("sorting", n, r, || Ok(sort_by_scores(&scores, exec)))?;
    let (neigh, table) = time_stage("neighbors", n, r, || {
        sequence_neighbors_with(&perm, config.k, exec)
    })?;
    let (nee, _) = time_stage("nee", n, r, || encode_nee_with(cloud, &table, exec))?;
    let (knn, _) = time_stage("knn_bruteforce", n, r, || {
        knn_bruteforce_with(cloud, config.k, exec)
    })?;
    Ok(BenchReport {
        n,
        k: config.k,
        repeats: r,
        seed: config.seed,
        parallel: exec.is_parallel(),
        threads: thread_count(exec),
        params: *params,
        stages: vec![scoring, sorting, neigh, nee, knn],
    })
}

fn thread_count(exec: Execution) -> usize {
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return rayon::current_num_threads();
    }
    let _ = exec;
    1
}

/// One [`LocalityReport`] per (variant, angle set) pair, all on the same cloud.
pub fn run_locality(config: &RunConfig) -> Result<Vec<LocalityReport>> {
    config.check()?;
    let cloud = load_input(config)?;
    locality_for_cloud(&cloud, config)
}

pub fn locality_for_cloud(cloud: &PointCloud, config: &RunConfig) -> Result<Vec<LocalityReport>> {
    config.check()?;
    if cloud.labels().is_none() {
        return Err(Error::invalid(
            "locality needs semantic labels: pass a .label file or a synthetic scene",
        ));
    }
    // grid search is exact and cross-checked against the brute-force oracle
    let truth = GridIndex::build(cloud)?.knn_with(config.k, config.exec)?;
    let mut reports = Vec::new();
    for &variant in &config.variants {
        let params = config.params_for(variant);
        for angles in &config.view_sets {
            let views = build_views_with(cloud, angles, &params, Default::default(), config.exec)?;
            reports.push(locality_report(cloud, &views, &truth, config.exec)?);
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scene_config(seed: u64) -> RunConfig {
        let spec = SceneSpec::scattered(12.0, 6, 200, 800, 0.01, seed).unwrap();
        let mut c = RunConfig::new(InputSource::Synthetic(spec));
        c.seed = seed;
        c
    }

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn config_checks() {
        let mut c = scene_config(0);
        c.k = 0;
        assert!(c.check().is_err());
        let mut c = scene_config(0);
        c.sample = 0;
        assert!(c.check().is_err());
        let mut c = scene_config(0);
        c.angles.clear();
        assert!(c.check().is_err());
        assert_eq!(
            scene_config(0).params_for(Variant::Ablation),
            SortParams::ablation()
        );
    }

    #[test]
    fn bench_reports_every_stage() {
        let c = scene_config(1);
        let r = run_benchmark(&c).unwrap();
        assert_eq!(r.n, 2000);
        for name in STAGES {
            let s = r.stage(name).unwrap();
            assert!(s.median_seconds > 0.0, "{name}");
            assert_eq!(s.runs_seconds.len(), 5);
        }
        let mut few = c.clone();
        few.repeats = 2;
        assert!(run_benchmark(&few).is_err());
    }

    #[test]
    fn locality_requires_labels() {
        let cloud = synth_scene(&SceneSpec::scattered(10.0, 3, 50, 100, 0.0, 0).unwrap(), 0)
            .unwrap()
            .without_labels();
        let c = RunConfig::new(InputSource::InMemory(cloud));
        assert!(run_locality(&c).is_err());
    }

    #[test]
    fn locality_reports_per_configuration() {
        let c = scene_config(2);
        let reports = run_locality(&c).unwrap();
        assert_eq!(reports.len(), 4);
        assert_eq!(reports[0].variant, Variant::Full);
        assert_eq!(reports[3].variant, Variant::Ablation);
        assert_eq!(reports[1].angles.len(), 4);
        for r in &reports {
            assert!((0.0..=1.0).contains(&r.recall_at_k));
            assert!((0.0..=1.0).contains(&r.label_purity));
            assert!(r.mean_neighbor_distance >= 0.0);
        }
        assert_eq!(reports, run_locality(&c).unwrap());
    }
}
