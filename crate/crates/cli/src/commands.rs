// SPDX-License-Identifier: Apache-2.0

use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use pillar_sfc::cloud::{synth_scene, write_kitti_bin, write_labels};
use pillar_sfc::export::{
    sidecar_path, write_features_bin, write_features_csv, write_features_csv_to, write_json,
    write_permutation, FeatureSidecar, PermutationSidecar, RoiSource,
};
use pillar_sfc::neighbors::multiview_features;
use pillar_sfc::pipeline::{benchmark_cloud, load_input, locality_for_cloud, BenchReport};
use pillar_sfc::sfc::{precision_check, validate_params, SortMode, Validity};
use pillar_sfc::views::{build_views_with, rotate_z};
use pillar_sfc::{
    Execution, FeatureBlock, LocalityReport, PointCloud, Roi, SceneSpec, SortParams, ViewSet,
};
use serde::Serialize;

use crate::args::{run_config, Format, InputArgs, OrderArgs, RoiArg};
use crate::{Cli, Command};

/// Tags a failure with the pipeline stage it came from.
fn at<T, E: Into<anyhow::Error>>(stage: &str, r: Result<T, E>) -> Result<T> {
    r.map_err(|e| e.into().context(format!("stage `{stage}` failed")))
}

pub fn run(cli: Cli) -> Result<()> {
    let exec = at("setup", cli.exec.init())?;
    match cli.command {
        Command::Sort { input, order, out } => sort(&input, &order, &out, exec),
        Command::Neighbors {
            input,
            order,
            k,
            out,
            format,
        } => neighbors(&input, &order, k, out.as_deref(), format, exec),
        Command::Locality {
            input,
            order,
            k,
            variants,
            out,
            format,
        } => {
            let params = at("arguments", order.params())?;
            let mut cfg = at("arguments", run_config(&input, params, k, exec))?;
            cfg.variants = variants.into_iter().map(Into::into).collect();
            cfg.view_sets = vec![vec![0.0], order.angles()];
            let cloud = at("load", load_input(&cfg))?;
            let reports = at("locality", locality_for_cloud(&cloud, &cfg))?;
            at("write", emit_locality(&reports, out.as_deref(), format))
        }
        Command::Bench {
            input,
            order,
            k,
            repeats,
            out,
            format,
        } => {
            let params = at("arguments", order.params())?;
            let mut cfg = at("arguments", run_config(&input, params, k, exec))?;
            cfg.repeats = repeats;
            let cloud = at("load", load_input(&cfg))?;
            let report = at("bench", benchmark_cloud(&cloud, &cfg))?;
            at("write", emit_bench(&report, out.as_deref(), format))
        }
        Command::Synth {
            spec,
            seed,
            extent,
            objects,
            points_per_object,
            ground_points,
            noise,
            out,
        } => {
            let spec = at(
                "arguments",
                match spec {
                    Some(p) => std::fs::read_to_string(&p)
                        .with_context(|| format!("cannot read scene spec {}", p.display()))
                        .and_then(|t| {
                            serde_json::from_str::<SceneSpec>(&t).context("scene spec is not valid")
                        }),
                    None => SceneSpec::scattered(
                        extent,
                        objects,
                        points_per_object,
                        ground_points,
                        noise,
                        seed,
                    )
                    .map_err(Into::into),
                },
            )?;
            let cloud = at("synthesize", synth_scene(&spec, seed))?;
            at("write", write_scene(&out, &cloud, &spec))
        }
    }
}

/// Rotated copies of the cloud, each paired with the roi it is checked against.
fn view_rois(cloud: &PointCloud, angles: &[f64], roi: RoiArg) -> Result<Vec<(Roi, RoiSource)>> {
    let hull = match roi {
        RoiArg::Hull => Some(Roi::rotation_hull(cloud)?),
        _ => None,
    };
    angles
        .iter()
        .map(|&a| {
            let view = rotate_z(cloud, a)?;
            Ok(match roi {
                RoiArg::Auto => (Roi::from_bounds(&view)?, RoiSource::BoundingBox),
                RoiArg::Hull => (hull.expect("hull computed above"), RoiSource::RotationHull),
                RoiArg::Explicit(r) => {
                    let outside = (0..view.len())
                        .filter(|&i| !r.contains(view.point(i)))
                        .count();
                    if outside > 0 {
                        bail!(
                            "{outside} points of the view at angle {a} lie outside the given roi"
                        );
                    }
                    (r, RoiSource::Explicit)
                }
            })
        })
        .collect()
}

/// Dominance verdict per view. A violation stops the run unless skipped.
fn validate(
    params: &SortParams,
    rois: &[(Roi, RoiSource)],
    angles: &[f64],
    skip: bool,
) -> Result<Vec<Validity>> {
    let mut out = Vec::with_capacity(rois.len());
    for ((roi, _), angle) in rois.iter().zip(angles) {
        let v = validate_params(params, roi)?;
        if let Validity::Violated(c) = v {
            let msg = format!(
                "{:?} level step {} does not exceed lower-level swing {} over roi {:?} (view angle {angle})",
                c.level, c.step, c.swing, roi
            );
            if !skip {
                bail!("{msg}; pass --skip-validation to sort anyway");
            }
            eprintln!("warning: {msg}");
        }
        out.push(v);
    }
    Ok(out)
}

struct Prepared {
    cloud: PointCloud,
    views: ViewSet,
    validity: Vec<Validity>,
    rois: Vec<(Roi, RoiSource)>,
}

fn prepare(input: &InputArgs, order: &OrderArgs, exec: Execution) -> Result<Prepared> {
    let params = at("arguments", order.params())?;
    let roi = at("arguments", order.roi())?;
    let angles = order.angles();
    if angles.is_empty() {
        return at(
            "arguments",
            Err(anyhow!("at least one view angle is required")),
        );
    }
    let cfg = at("arguments", run_config(input, params, 1, exec))?;
    let cloud = at("load", load_input(&cfg))?;
    if cloud.is_empty() {
        return at("load", Err(anyhow!("the input cloud has no points")));
    }
    let rois = at("validate", view_rois(&cloud, &angles, roi))?;
    let validity = at(
        "validate",
        validate(&params, &rois, &angles, order.skip_validation),
    )?;
    let mode = if order.exact {
        SortMode::ExactKey
    } else {
        SortMode::Score
    };
    let views = at(
        "sort",
        build_views_with(&cloud, &angles, &params, mode, exec),
    )?;
    Ok(Prepared {
        cloud,
        views,
        validity,
        rois,
    })
}

/// `perm.bin` -> `perm.view2.bin` when several views are written.
fn view_path(out: &Path, view: usize, views: usize) -> PathBuf {
    if views == 1 {
        return out.to_path_buf();
    }
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}.view{view}.{}", ext.to_string_lossy()),
        None => format!("{stem}.view{view}"),
    };
    out.with_file_name(name)
}

fn sort(input: &InputArgs, order: &OrderArgs, out: &Path, exec: Execution) -> Result<()> {
    let Prepared {
        cloud,
        views,
        validity,
        rois,
    } = prepare(input, order, exec)?;
    let mode = if order.exact {
        SortMode::ExactKey
    } else {
        SortMode::Score
    };
    for (i, view) in views.views().iter().enumerate() {
        let path = view_path(out, i, views.len());
        let (roi, roi_source) = rois[i];
        let sidecar = PermutationSidecar {
            format: "u64le".into(),
            n: cloud.len(),
            variant: views.params().variant,
            params: *views.params(),
            angle: view.angle,
            mode,
            roi,
            roi_source,
            validity: validity[i],
            precision: at("validate", precision_check(views.params(), &roi))?,
        };
        at("write", write_permutation(&path, &view.perm))?;
        at("write", write_json(&sidecar_path(&path), &sidecar))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

#[derive(Serialize)]
struct FeatureJson<'a> {
    #[serde(flatten)]
    shape: &'a FeatureSidecar,
    values: Vec<&'a [f64]>,
}

fn neighbors(
    input: &InputArgs,
    order: &OrderArgs,
    k: usize,
    out: Option<&Path>,
    format: Format,
    exec: Execution,
) -> Result<()> {
    if k == 0 {
        return at("arguments", Err(anyhow!("k must be at least 1")));
    }
    let views = prepare(input, order, exec)?.views;
    let block = at("neighbors", multiview_features(&views, k, exec))?;
    let shape = FeatureSidecar {
        format: match format {
            Format::Bin => "f32le",
            Format::Csv => "csv",
            Format::Json => "json",
        }
        .into(),
        rows: block.len(),
        cols: block.dim(),
        columns: block.columns().to_vec(),
        k,
        angles: views.angles(),
        params: *views.params(),
    };
    at("write", emit_features(&block, &shape, out, format))
}

fn emit_features(
    block: &FeatureBlock,
    shape: &FeatureSidecar,
    out: Option<&Path>,
    format: Format,
) -> Result<()> {
    match (format, out) {
        (Format::Csv, Some(p)) => write_features_csv(p, block)?,
        (Format::Csv, None) => write_features_csv_to(&mut std::io::stdout().lock(), block)?,
        (Format::Bin, Some(p)) => {
            write_features_bin(p, block)?;
            write_json(&sidecar_path(p), shape)?;
        }
        (Format::Bin, None) => bail!("--format bin needs --out"),
        (Format::Json, out) => {
            let doc = FeatureJson {
                shape,
                values: (0..block.len()).map(|i| block.row(i)).collect(),
            };
            emit_json(&doc, out)?;
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => write_json(p, value)?,
        None => {
            let mut w = std::io::stdout().lock();
            serde_json::to_writer_pretty(&mut w, value)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

fn emit_csv(header: &str, rows: &[String], out: Option<&Path>) -> Result<()> {
    let mut text = String::from(header);
    text.push('\n');
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    match out {
        Some(p) => {
            std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))?
        }
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn join<T: Display>(v: &[T], sep: &str) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

fn emit_locality(reports: &[LocalityReport], out: Option<&Path>, format: Format) -> Result<()> {
    match format {
        Format::Json => emit_json(&reports, out),
        Format::Csv => {
            let rows: Vec<String> = reports
                .iter()
                .map(|r| {
                    format!(
                        "{},{},{},{},{},{},{},{:?}",
                        r.variant.name(),
                        join(&r.angles, ";"),
                        r.n,
                        r.k,
                        r.recall_at_k,
                        r.mean_neighbor_distance,
                        r.label_purity,
                        r.candidate
                    )
                })
                .collect();
            emit_csv(
                "variant,angles,n,k,recall_at_k,mean_neighbor_distance,label_purity,candidate",
                &rows,
                out,
            )
        }
        Format::Bin => bail!("locality reports are written as json or csv"),
    }
}

fn emit_bench(report: &BenchReport, out: Option<&Path>, format: Format) -> Result<()> {
    match format {
        Format::Json => emit_json(report, out),
        Format::Csv => {
            let rows: Vec<String> = report
                .stages
                .iter()
                .map(|s| {
                    format!(
                        "{},{},{},{},{},{},{}",
                        s.stage,
                        report.n,
                        report.k,
                        s.median_seconds,
                        s.points_per_second,
                        s.iterations,
                        report.threads
                    )
                })
                .collect();
            emit_csv(
                "stage,n,k,median_seconds,points_per_second,iterations,threads",
                &rows,
                out,
            )
        }
        Format::Bin => bail!("benchmark reports are written as json or csv"),
    }
}

fn write_scene(out: &Path, cloud: &PointCloud, spec: &SceneSpec) -> Result<()> {
    let with = |ext: &str| {
        let mut s = out.as_os_str().to_owned();
        s.push(ext);
        PathBuf::from(s)
    };
    write_kitti_bin(with(".bin"), cloud)?;
    write_labels(
        with(".label"),
        cloud.labels().expect("synthetic scenes are labeled"),
    )?;
    write_json(&with(".scene.json"), spec)?;
    eprintln!("wrote {} points to {}", cloud.len(), with(".bin").display());
    Ok(())
}
