use serde::{Deserialize, Serialize};

use super::forward::CoupledFixedPoint;
use crate::channel::ChannelFamily;
use crate::error::{Error, Result};
use crate::uncoupled::{stable_fixed_point, RegularEnsemble};

/// Largest `|x_i - x_{-i}|` still reported as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-8;
/// Differences below this are treated as flat by the unimodality test.
const FLAT_TOL: f64 = 1e-12;

/// Shape diagnostics of a non-trivial fixed-point constellation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeReport {
    pub is_symmetric: bool,
    pub max_asymmetry: f64,
    pub is_unimodal: bool,
    /// Median of the middle third of the sections.
    pub plateau_value: f64,
    /// Sections strictly between the last one below 1% of the plateau and
    /// the first one above 99% of it, the larger of the two flanks.
    pub transition_width: usize,
    /// Stable fixed point of the uncoupled ensemble at the same channel.
    pub uncoupled_stable_value: f64,
}

/// Symmetry, unimodality, plateau and transition diagnostics for `fp`,
/// compared with the uncoupled ensemble `ens` over the dicode channel.
pub fn shape_report(fp: &CoupledFixedPoint, ens: &RegularEnsemble) -> Result<ShapeReport> {
    shape_report_for(fp, ens, &ChannelFamily::Dec)
}

pub fn shape_report_for(fp: &CoupledFixedPoint, ens: &RegularEnsemble, family: &ChannelFamily) -> Result<ShapeReport> {
    let x = fp.constellation.values();
    if x.iter().all(|&v| v == 0.0) {
        return Err(Error::Degenerate("constellation is identically zero".into()));
    }
    let n = x.len();
    let max_asymmetry = fp.constellation.max_asymmetry();

    let mid = n / 2;
    let rising = &x[..=mid];
    let falling: Vec<f64> = x[mid..].iter().rev().copied().collect();
    let is_unimodal = non_decreasing(rising) && non_decreasing(&falling);

    let lo = n / 3;
    let hi = (2 * n).div_ceil(3).max(lo + 1);
    let mut middle = x[lo..hi].to_vec();
    middle.sort_by(f64::total_cmp);
    let plateau_value = median(&middle);

    let transition_width = transition(rising, plateau_value).max(transition(&falling, plateau_value));
    let uncoupled_stable_value = stable_fixed_point(ens, &family.at(fp.epsilon)?)?;

    Ok(ShapeReport {
        is_symmetric: max_asymmetry < SYMMETRY_TOL,
        max_asymmetry,
        is_unimodal,
        plateau_value,
        transition_width,
        uncoupled_stable_value,
    })
}

fn non_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] - w[0] >= -FLAT_TOL)
}

fn median(sorted: &[f64]) -> f64 {
    let k = sorted.len();
    if k % 2 == 1 {
        sorted[k / 2]
    } else {
        0.5 * (sorted[k / 2 - 1] + sorted[k / 2])
    }
}

/// Width of the rise from below 1% to above 99% of `plateau` along an
/// edge-to-centre sequence.
fn transition(edge_to_centre: &[f64], plateau: f64) -> usize {
    let low = 0.01 * plateau;
    let high = 0.99 * plateau;
    let Some(first_high) = edge_to_centre.iter().position(|&v| v > high) else {
        return 0;
    };
    match edge_to_centre[..first_high].iter().rposition(|&v| v < low) {
        Some(last_low) => first_high - last_low - 1,
        None => first_high,
    }
}
