// SPDX-License-Identifier: Apache-2.0

//! Labeled synthetic scenes: a flat ground rectangle plus vertical cylinders.
//!
//! Every generated coordinate is rounded to `f32`, so a scene written to the
//! KITTI layout and read back is identical to the in-memory cloud.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::PointCloud;
use crate::{Error, Result};

pub const GROUND_CLASS: u16 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundRect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

/// A standing object: a vertical cylinder shell rising from z = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PillarObject {
    pub center: [f64; 2],
    pub radius: f64,
    pub height: f64,
    pub class: u16,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub ground: GroundRect,
    pub ground_points: usize,
    pub objects: Vec<PillarObject>,
    pub points_per_object: usize,
    #[serde(default)]
    pub noise_sigma: f64,
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        let g = &self.ground;
        if !(g.x_min < g.x_max && g.y_min < g.y_max) {
            return Err(Error::InvalidSpec("ground rectangle is empty".into()));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "noise_sigma must be finite and non-negative, got {}",
                self.noise_sigma
            )));
        }
        if !self.objects.is_empty() && self.points_per_object == 0 {
            return Err(Error::InvalidSpec(
                "points_per_object must be positive".into(),
            ));
        }
        if self.ground_points == 0 && self.objects.is_empty() {
            return Err(Error::InvalidSpec("scene has no points".into()));
        }
        for (i, o) in self.objects.iter().enumerate() {
            if !(o.radius > 0.0 && o.radius.is_finite()) {
                return Err(Error::InvalidSpec(format!(
                    "object {i}: radius must be positive"
                )));
            }
            if !(o.height > 0.0 && o.height.is_finite()) {
                return Err(Error::InvalidSpec(format!(
                    "object {i}: height must be positive"
                )));
            }
            if !(o.center[0].is_finite() && o.center[1].is_finite()) {
                return Err(Error::InvalidSpec(format!(
                    "object {i}: center is not finite"
                )));
            }
        }
        for (i, a) in self.objects.iter().enumerate() {
            for (j, b) in self.objects.iter().enumerate().skip(i + 1) {
                let d = (a.center[0] - b.center[0]).hypot(a.center[1] - b.center[1]);
                if d < a.radius + b.radius {
                    return Err(Error::InvalidSpec(format!(
                        "objects {i} and {j} overlap: centers {d:.3} m apart, radii sum {:.3} m",
                        a.radius + b.radius
                    )));
                }
            }
        }
        Ok(())
    }

    /// A square ground patch of half-width `half_extent` with `objects`
    /// cylinders scattered on it: radius in [0.3, 1.2] m, height in [1.5, 4] m,
    /// class ids 1, 2, ... and at least 0.5 m of clearance between shells.
    pub fn scattered(
        half_extent: f64,
        objects: usize,
        points_per_object: usize,
        ground_points: usize,
        noise_sigma: f64,
        seed: u64,
    ) -> Result<Self> {
        if half_extent.is_nan() || half_extent <= 2.0 {
            return Err(Error::InvalidSpec("half_extent must exceed 2 m".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut placed: Vec<PillarObject> = Vec::with_capacity(objects);
        let mut attempts = 0usize;
        while placed.len() < objects {
            attempts += 1;
            if attempts > 10_000 * objects.max(1) {
                return Err(Error::InvalidSpec(format!(
                    "could not place {objects} objects on a {half_extent} m half-extent patch"
                )));
            }
            let radius = rng.random_range(0.3..1.2);
            let lim = half_extent - radius;
            let center = [rng.random_range(-lim..lim), rng.random_range(-lim..lim)];
            let clear = placed.iter().all(|o| {
                (o.center[0] - center[0]).hypot(o.center[1] - center[1]) >= o.radius + radius + 0.5
            });
            if clear {
                placed.push(PillarObject {
                    center,
                    radius,
                    height: rng.random_range(1.5..4.0),
                    class: placed.len() as u16 + 1,
                });
            }
        }
        Ok(SceneSpec {
            ground: GroundRect {
                x_min: -half_extent,
                x_max: half_extent,
                y_min: -half_extent,
                y_max: half_extent,
            },
            ground_points,
            objects: placed,
            points_per_object,
            noise_sigma,
        })
    }
}

#[inline]
fn to_f32(v: f64) -> f64 {
    v as f32 as f64
}

/// Generates the labeled cloud for `spec`. Ground points come first, then
/// each object's points in object order. Deterministic per seed.
pub fn synth_scene(spec: &SceneSpec, seed: u64) -> Result<PointCloud> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.ground_points + spec.objects.len() * spec.points_per_object;
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);

    let g = &spec.ground;
    for _ in 0..spec.ground_points {
        x.push(rng.random_range(g.x_min..g.x_max));
        y.push(rng.random_range(g.y_min..g.y_max));
        z.push(0.0);
        labels.push(GROUND_CLASS);
    }

    for o in &spec.objects {
        for _ in 0..spec.points_per_object {
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            let h = rng.random_range(0.0..o.height);
            x.push(o.center[0] + o.radius * theta.cos());
            y.push(o.center[1] + o.radius * theta.sin());
            z.push(h);
            labels.push(o.class);
        }
    }

    if spec.noise_sigma > 0.0 {
        let normal =
            Normal::new(0.0, spec.noise_sigma).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        for col in [&mut x, &mut y, &mut z] {
            for v in col.iter_mut() {
                *v += normal.sample(&mut rng);
            }
        }
        for col in [&mut x, &mut y, &mut z] {
            col.iter_mut().for_each(|v| *v = to_f32(*v));
        }
    } else {
        quantize_exact(spec, &mut x, &mut y, &mut z);
    }

    PointCloud::new(x, y, z)?
        .with_intensity(vec![0.0; n])?
        .with_labels(labels)
}

/// Rounds to `f32` while keeping noise-free object points on or inside their
/// cylinder, since rounding can push a shell point a few ulps outward.
fn quantize_exact(spec: &SceneSpec, x: &mut [f64], y: &mut [f64], z: &mut [f64]) {
    for i in 0..spec.ground_points {
        x[i] = to_f32(x[i]);
        y[i] = to_f32(y[i]);
    }
    let mut i = spec.ground_points;
    for o in &spec.objects {
        for _ in 0..spec.points_per_object {
            let (dx, dy) = (x[i] - o.center[0], y[i] - o.center[1]);
            let mut scale = 1.0;
            loop {
                let qx = to_f32(o.center[0] + dx * scale);
                let qy = to_f32(o.center[1] + dy * scale);
                if (qx - o.center[0]).hypot(qy - o.center[1]) <= o.radius {
                    x[i] = qx;
                    y[i] = qy;
                    break;
                }
                scale *= 1.0 - 1e-6;
            }
            let mut qz = z[i] as f32;
            while qz as f64 > o.height {
                qz = qz.next_down();
            }
            z[i] = qz as f64;
            i += 1;
        }
    }
}
