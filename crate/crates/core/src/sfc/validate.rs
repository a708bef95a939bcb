// SPDX-License-Identifier: Apache-2.0

//! Dominance of each score level over everything below it.
//!
//! Moving one cell along a level changes the score by that level's weight.
//! The sort is strictly cell-by-cell only if that step exceeds the largest
//! change all lower-priority terms can produce inside the region of interest.

use serde::{Deserialize, Serialize};

use super::score::cell_index;
use super::{Axis, Roi, SortParams, Variant};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelCheck {
    pub level: Axis,
    /// Score change for one cell at this level.
    pub step: f64,
    /// Largest score change of all lower-priority terms over the roi.
    pub swing: f64,
}

impl LevelCheck {
    /// `step - swing`; must be strictly positive.
    pub fn margin(&self) -> f64 {
        self.step - self.swing
    }

    pub fn holds(&self) -> bool {
        self.step > self.swing
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Validity {
    Ok,
    Violated(LevelCheck),
}

impl Validity {
    pub fn is_ok(&self) -> bool {
        matches!(self, Validity::Ok)
    }
}

fn cell_span(roi: &Roi, p: &SortParams, axis: Axis) -> f64 {
    let [lo, hi] = roi.range(axis);
    let r = p.rate(axis);
    cell_index(hi, r) - cell_index(lo, r)
}

/// One check per cell level, most significant first.
pub fn dominance_checks(params: &SortParams, roi: &Roi) -> Result<Vec<LevelCheck>> {
    roi.check()?;
    if params.variant == Variant::Simple2d {
        // Only the x level exists; the lower term is raw y.
        return Ok(vec![LevelCheck {
            level: Axis::X,
            step: params.k_x,
            swing: (roi.y_max - roi.y_min) * params.r_x,
        }]);
    }
    let prio = params.variant.priority();
    let [rho_lo, rho_hi] = roi.rho_range();
    let rho_swing = params.k_rho * (rho_hi - rho_lo);
    Ok(prio
        .iter()
        .enumerate()
        .map(|(i, &level)| {
            let swing = prio[i + 1..]
                .iter()
                .map(|&a| params.weight(a) * cell_span(roi, params, a))
                .sum::<f64>()
                + rho_swing;
            LevelCheck {
                level,
                step: params.weight(level),
                swing,
            }
        })
        .collect())
}

/// `Ok`, or the first level (in priority order) whose step does not exceed
/// the swing below it.
pub fn validate_params(params: &SortParams, roi: &Roi) -> Result<Validity> {
    Ok(dominance_checks(params, roi)?
        .into_iter()
        .find(|c| !c.holds())
        .map_or(Validity::Ok, Validity::Violated))
}

/// How finely a 64-bit score can still resolve the radius term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionCheck {
    /// Largest |score| reachable inside the roi.
    pub max_abs_score: f64,
    /// Spacing of adjacent `f64` values at that magnitude.
    pub score_ulp: f64,
    /// Radius difference (m) that moves the score by one ulp there. Radius
    /// differences smaller than this can tie or misorder in the float score.
    pub rho_resolution: f64,
}

pub fn precision_check(params: &SortParams, roi: &Roi) -> Result<PrecisionCheck> {
    roi.check()?;
    let extreme = |a: Axis| {
        let [lo, hi] = roi.range(a);
        let r = params.rate(a);
        cell_index(lo, r).abs().max(cell_index(hi, r).abs())
    };
    let max_abs_score = match params.variant {
        Variant::Simple2d => params.k_x * extreme(Axis::X) + roi.y_min.abs().max(roi.y_max.abs()),
        _ => {
            [Axis::X, Axis::Y, Axis::Z]
                .iter()
                .map(|&a| params.weight(a) * extreme(a))
                .sum::<f64>()
                + params.k_rho * roi.rho_range()[1]
        }
    };
    let score_ulp = max_abs_score.next_up() - max_abs_score;
    let tail_weight = match params.variant {
        Variant::Simple2d => 1.0,
        _ => params.k_rho,
    };
    Ok(PrecisionCheck {
        max_abs_score,
        score_ulp,
        rho_resolution: score_ulp / tail_weight,
    })
}
