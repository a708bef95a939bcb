// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use pillar_sfc::pipeline::{InputSource, RunConfig, DEFAULT_K, DEFAULT_SAMPLE, MIN_REPEATS};
use pillar_sfc::views::DEFAULT_ANGLES;
use pillar_sfc::{Execution, Roi, SceneSpec, SortParams, Variant};

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// KITTI `.bin` scan; `-` reads the scan from stdin.
    #[arg(long, conflicts_with = "synth")]
    pub input: Option<PathBuf>,
    /// SemanticKITTI `.label` file matching `--input`.
    #[arg(long, requires = "input")]
    pub labels: Option<PathBuf>,
    /// Synthetic scene spec (JSON) instead of a scan.
    #[arg(long)]
    pub synth: Option<PathBuf>,
    /// Uniformly sample the cloud down to this many points.
    #[arg(long, default_value_t = DEFAULT_SAMPLE)]
    pub sample: usize,
    /// Seed for sampling and scene synthesis.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl InputArgs {
    pub fn source(&self) -> Result<InputSource> {
        match (&self.input, &self.synth) {
            (Some(p), None) if p.as_os_str() == "-" => {
                if self.labels.is_some() {
                    bail!("--labels cannot be combined with a scan on stdin");
                }
                Ok(InputSource::Stdin)
            }
            (Some(p), None) => Ok(InputSource::Kitti {
                bin: p.clone(),
                labels: self.labels.clone(),
            }),
            (None, Some(spec)) => {
                let text = std::fs::read_to_string(spec)
                    .with_context(|| format!("cannot read scene spec {}", spec.display()))?;
                let spec: SceneSpec = serde_json::from_str(&text)
                    .with_context(|| format!("scene spec {} is not valid", spec.display()))?;
                Ok(InputSource::Synthetic(spec))
            }
            _ => bail!("exactly one of --input or --synth is required"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Full,
    Ablation,
    Simple2d,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Full => Variant::Full,
            VariantArg::Ablation => Variant::Ablation,
            VariantArg::Simple2d => Variant::Simple2d,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OrderArgs {
    /// Sort parameters as a JSON file or inline JSON object. Defaults to the
    /// preset of `--variant`.
    #[arg(long)]
    pub params: Option<String>,
    /// Scorer variant.
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// View angles in radians, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub angles: Option<Vec<f64>>,
    /// Region of interest for the dominance check: `auto` (each view's
    /// bounding box), `hull` (box holding the cloud under any z rotation), or
    /// `xmin,xmax,ymin,ymax,zmin,zmax` in meters.
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    pub roi: String,
    /// Sort on exact integer cell keys instead of float scores.
    #[arg(long)]
    pub exact: bool,
    /// Record a failed dominance check in the sidecar instead of stopping.
    #[arg(long)]
    pub skip_validation: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RoiArg {
    Auto,
    Hull,
    Explicit(Roi),
}

impl OrderArgs {
    pub fn params(&self) -> Result<SortParams> {
        let Some(raw) = &self.params else {
            return Ok(SortParams::preset(
                self.variant.map(Into::into).unwrap_or_default(),
            ));
        };
        let text = if raw.trim_start().starts_with('{') {
            raw.clone()
        } else {
            std::fs::read_to_string(raw)
                .with_context(|| format!("cannot read params file {raw}"))?
        };
        let mut p: SortParams =
            serde_json::from_str(&text).context("params are not valid JSON sort parameters")?;
        if let Some(v) = self.variant {
            let v = Variant::from(v);
            let explicit = serde_json::from_str::<serde_json::Value>(&text)?
                .get("variant")
                .is_some();
            if explicit && p.variant != v {
                bail!(
                    "--variant {} contradicts params variant {}",
                    v.name(),
                    p.variant.name()
                );
            }
            p.variant = v;
        }
        p.check()?;
        Ok(p)
    }

    pub fn angles(&self) -> Vec<f64> {
        self.angles
            .clone()
            .unwrap_or_else(|| DEFAULT_ANGLES.to_vec())
    }

    pub fn roi(&self) -> Result<RoiArg> {
        match self.roi.trim() {
            "auto" => Ok(RoiArg::Auto),
            "hull" => Ok(RoiArg::Hull),
            list => {
                let v: Vec<f64> = list
                    .split(',')
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| anyhow!("bad --roi value {list:?}: {e}"))?;
                if v.len() != 6 {
                    bail!("--roi needs six numbers, got {}", v.len());
                }
                Ok(RoiArg::Explicit(Roi::new(
                    [v[0], v[1]],
                    [v[2], v[3]],
                    [v[4], v[5]],
                )?))
            }
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ExecArgs {
    /// Worker threads; 1 runs every kernel sequentially. Defaults to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

impl ExecArgs {
    /// Sets up the global pool and picks the execution path.
    pub fn init(&self) -> Result<Execution> {
        match self.threads {
            Some(0) => bail!("--threads must be at least 1"),
            Some(1) => Ok(Execution::Sequential),
            #[cfg(feature = "parallel")]
            Some(t) => {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build_global()
                    .context("cannot start the worker pool")?;
                Ok(Execution::Parallel)
            }
            #[cfg(not(feature = "parallel"))]
            Some(t) => bail!("--threads {t} needs a build with the `parallel` feature"),
            None => Ok(Execution::Parallel),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Bin,
}

pub fn run_config(
    input: &InputArgs,
    params: SortParams,
    k: usize,
    exec: Execution,
) -> Result<RunConfig> {
    let mut cfg = RunConfig::new(input.source()?);
    cfg.params = params;
    cfg.k = k;
    cfg.sample = input.sample;
    cfg.seed = input.seed;
    cfg.exec = exec;
    cfg.repeats = MIN_REPEATS;
    Ok(cfg)
}

pub const K_DEFAULT: usize = DEFAULT_K;
