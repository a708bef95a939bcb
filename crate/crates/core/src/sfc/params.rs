// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::{Error, PointCloud, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Which scoring formula a [`SortParams`] drives.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// x pillars, then y pillars, then z voxels, then radius.
    #[default]
    Full,
    /// z slabs first, then x and y cells, then radius. The ordering that
    /// does not stack standing objects together.
    Ablation,
    /// `k_x * round(x * r_x) + y`, the two-dimensional illustration.
    Simple2d,
}

impl Variant {
    /// Cell axes from most to least significant. `Simple2d` has a single
    /// cell level followed by raw y.
    pub fn priority(self) -> &'static [Axis] {
        match self {
            Variant::Full => &[Axis::X, Axis::Y, Axis::Z],
            Variant::Ablation => &[Axis::Z, Axis::X, Axis::Y],
            Variant::Simple2d => &[Axis::X],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::Ablation => "ablation",
            Variant::Simple2d => "simple2d",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" => Ok(Variant::Full),
            "ablation" => Ok(Variant::Ablation),
            "simple2d" => Ok(Variant::Simple2d),
            other => Err(Error::invalid(format!(
                "unknown variant `{other}` (expected full, ablation or simple2d)"
            ))),
        }
    }
}

/// Score weights `k_*` (dimensionless) and inverse cell sizes `r_*` (1/m).
///
/// Weights keep their axis meaning across variants: the ablation preset puts
/// the dominant weight on `k_z`. `Simple2d` reads only `k_x` and `r_x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SortParams {
    pub k_x: f64,
    pub k_y: f64,
    pub k_z: f64,
    pub k_rho: f64,
    pub r_x: f64,
    pub r_y: f64,
    pub r_z: f64,
    #[serde(default)]
    pub variant: Variant,
}

impl Default for SortParams {
    fn default() -> Self {
        Self::full()
    }
}

impl SortParams {
    /// Default weights with 0.83 m pillars and 0.25 m voxels.
    pub const fn full() -> Self {
        SortParams {
            k_x: 1e10,
            k_y: 1e5,
            k_z: 1.0,
            k_rho: 1e-5,
            r_x: 1.2,
            r_y: 1.2,
            r_z: 4.0,
            variant: Variant::Full,
        }
    }

    /// Same cell sizes as [`SortParams::full`], weights re-ranked z > x > y > rho.
    pub const fn ablation() -> Self {
        SortParams {
            k_x: 1e5,
            k_y: 1.0,
            k_z: 1e10,
            k_rho: 1e-5,
            r_x: 1.2,
            r_y: 1.2,
            r_z: 4.0,
            variant: Variant::Ablation,
        }
    }

    pub const fn simple2d(k_x: f64, r_x: f64) -> Self {
        SortParams {
            k_x,
            k_y: 1.0,
            k_z: 1.0,
            k_rho: 1.0,
            r_x,
            r_y: 1.0,
            r_z: 1.0,
            variant: Variant::Simple2d,
        }
    }

    /// Default parameters for a variant.
    pub fn preset(variant: Variant) -> Self {
        match variant {
            Variant::Full => Self::full(),
            Variant::Ablation => Self::ablation(),
            Variant::Simple2d => Self::simple2d(1e5, 1.2),
        }
    }

    #[inline]
    pub fn weight(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.k_x,
            Axis::Y => self.k_y,
            Axis::Z => self.k_z,
        }
    }

    #[inline]
    pub fn rate(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.r_x,
            Axis::Y => self.r_y,
            Axis::Z => self.r_z,
        }
    }

    /// Positivity of every weight and rate, and the strict weight ranking
    /// of the variant's priority order.
    pub fn check(&self) -> Result<()> {
        let named = [
            ("k_x", self.k_x),
            ("k_y", self.k_y),
            ("k_z", self.k_z),
            ("k_rho", self.k_rho),
            ("r_x", self.r_x),
            ("r_y", self.r_y),
            ("r_z", self.r_z),
        ];
        for (name, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.variant == Variant::Simple2d {
            return Ok(());
        }
        let prio = self.variant.priority();
        let mut ranked: Vec<(String, f64)> = prio
            .iter()
            .map(|&a| (format!("k_{a:?}").to_lowercase(), self.weight(a)))
            .collect();
        ranked.push(("k_rho".into(), self.k_rho));
        for w in ranked.windows(2) {
            if w[0].1.partial_cmp(&w[1].1) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::InvalidParams(format!(
                    "{} variant requires {} > {} (got {} <= {})",
                    self.variant.name(),
                    w[0].0,
                    w[1].0,
                    w[0].1,
                    w[1].1
                )));
            }
        }
        Ok(())
    }
}

/// Axis-aligned region of interest, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Roi {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub z_min: f64,
    pub z_max: f64,
}

impl Roi {
    pub fn new(x: [f64; 2], y: [f64; 2], z: [f64; 2]) -> Result<Self> {
        let roi = Roi {
            x_min: x[0],
            x_max: x[1],
            y_min: y[0],
            y_max: y[1],
            z_min: z[0],
            z_max: z[1],
        };
        roi.check()?;
        Ok(roi)
    }

    pub fn check(&self) -> Result<()> {
        for (axis, lo, hi) in [
            ("x", self.x_min, self.x_max),
            ("y", self.y_min, self.y_max),
            ("z", self.z_min, self.z_max),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::invalid(format!(
                    "roi {axis} range [{lo}, {hi}] is empty or not finite"
                )));
            }
        }
        Ok(())
    }

    /// Bounding box of the cloud; degenerate axes are widened by 0.5 m each way.
    pub fn from_bounds(cloud: &PointCloud) -> Result<Self> {
        let (lo, hi) = cloud
            .bounds()
            .ok_or_else(|| Error::invalid("cannot derive a roi from an empty cloud"))?;
        let widen = |a: usize| {
            if lo[a] < hi[a] {
                [lo[a], hi[a]]
            } else {
                [lo[a] - 0.5, hi[a] + 0.5]
            }
        };
        Roi::new(widen(0), widen(1), widen(2))
    }

    /// A box that contains the cloud under every rotation about z:
    /// `[-rho_max, rho_max]` in x and y, the cloud's z range.
    pub fn rotation_hull(cloud: &PointCloud) -> Result<Self> {
        let base = Self::from_bounds(cloud)?;
        let rho_max = (0..cloud.len())
            .map(|i| cloud.x()[i].hypot(cloud.y()[i]))
            .fold(0.0f64, f64::max)
            .max(0.5);
        Roi::new(
            [-rho_max, rho_max],
            [-rho_max, rho_max],
            [base.z_min, base.z_max],
        )
    }

    pub fn range(&self, axis: Axis) -> [f64; 2] {
        match axis {
            Axis::X => [self.x_min, self.x_max],
            Axis::Y => [self.y_min, self.y_max],
            Axis::Z => [self.z_min, self.z_max],
        }
    }

    /// Smallest and largest `sqrt(x^2 + y^2)` over the xy rectangle.
    pub fn rho_range(&self) -> [f64; 2] {
        let near = |lo: f64, hi: f64| 0.0f64.clamp(lo, hi);
        let far = |lo: f64, hi: f64| lo.abs().max(hi.abs());
        [
            near(self.x_min, self.x_max).hypot(near(self.y_min, self.y_max)),
            far(self.x_min, self.x_max).hypot(far(self.y_min, self.y_max)),
        ]
    }

    pub fn contains(&self, p: [f64; 3]) -> bool {
        (self.x_min..=self.x_max).contains(&p[0])
            && (self.y_min..=self.y_max).contains(&p[1])
            && (self.z_min..=self.z_max).contains(&p[2])
    }
}
