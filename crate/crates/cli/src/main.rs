// SPDX-License-Identifier: Apache-2.0

//! `pillar-sfc`: sort LiDAR scans along the pillar curve, extract
//! sequence-neighbor features, measure locality and time the pipeline.

mod args;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use args::{ExecArgs, Format, InputArgs, OrderArgs, VariantArg, K_DEFAULT};
use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "pillar-sfc",
    version,
    about = "Space-filling-curve ordering for LiDAR point clouds"
)]
struct Cli {
    #[command(flatten)]
    exec: ExecArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sort the cloud once per view; writes one u64 permutation file and a
    /// JSON sidecar per view.
    Sort {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        order: OrderArgs,
        /// Permutation file. With several views, `.view<i>` is inserted
        /// before the extension.
        #[arg(long)]
        out: PathBuf,
    },
    /// Sequence-neighbor features fused over all views.
    Neighbors {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        order: OrderArgs,
        #[arg(long, default_value_t = K_DEFAULT)]
        k: usize,
        /// Output file; csv and json go to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Recall, neighbor distance and label purity of each configuration
    /// against exact KNN.
    Locality {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        order: OrderArgs,
        #[arg(long, default_value_t = K_DEFAULT)]
        k: usize,
        /// Scorer variants to compare.
        #[arg(
            long,
            value_enum,
            value_delimiter = ',',
            default_value = "full,ablation"
        )]
        variants: Vec<VariantArg>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Median stage timings over repeated runs.
    Bench {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        order: OrderArgs,
        #[arg(long, default_value_t = K_DEFAULT)]
        k: usize,
        /// Timed runs per stage (at least 5).
        #[arg(long, default_value_t = pillar_sfc::pipeline::MIN_REPEATS)]
        repeats: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Generate a labeled scene of cylinders on flat ground; writes
    /// `<out>.bin`, `<out>.label` and `<out>.scene.json`.
    Synth {
        /// Scene spec (JSON). Without it, a scattered scene is drawn.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Half side of the square ground, meters.
        #[arg(long, default_value_t = 20.0)]
        extent: f64,
        #[arg(long, default_value_t = 12)]
        objects: usize,
        #[arg(long, default_value_t = 500)]
        points_per_object: usize,
        #[arg(long, default_value_t = 4000)]
        ground_points: usize,
        /// Gaussian position noise, meters.
        #[arg(long, default_value_t = 0.02)]
        noise: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pillar-sfc: {e:#}");
            ExitCode::FAILURE
        }
    }
}
