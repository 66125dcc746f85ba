use serde::{Deserialize, Serialize};

use super::ensemble::CoupledEnsemble;
use super::kernel::Kernel;
use super::reverse::{reverse_de_with, ReverseConfig};
use crate::channel::ChannelFamily;
use crate::error::{Error, Result};
use crate::par;

/// One point of the coupled EXIT-like curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledExitPoint {
    pub chi: f64,
    /// Section average of `y_i^dl`, the probability that a bit is erased
    /// given the LDPC side only. `None` when reverse DE failed.
    pub exit_value: Option<f64>,
    pub epsilon: Option<f64>,
    pub residual: Option<f64>,
    /// Reason for a failed point.
    pub error: Option<String>,
}

/// Runs reverse DE for every `chi` in `chi_grid` and returns the curve
/// sorted by `chi`. Failures are recorded per point.
pub fn exit_curve_coupled(
    ens: &CoupledEnsemble,
    family: &ChannelFamily,
    chi_grid: &[f64],
    config: &ReverseConfig,
) -> Result<Vec<CoupledExitPoint>> {
    if let Some(&bad) = chi_grid.iter().find(|&&c| !(c > 0.0 && c < 1.0)) {
        return Err(Error::Domain {
            name: "chi",
            value: bad,
            domain: "(0, 1)",
        });
    }
    let mut grid = chi_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    Ok(par::map(&grid, |&chi| match reverse_de_with(ens, family, chi, config, None) {
        Ok(fp) => {
            let mut checks = Vec::new();
            Kernel::default().check_averages_into(&ens.base(), ens.w() as usize, fp.constellation.values(), &mut checks);
            let exit = checks.iter().map(|y| y.powi(ens.dl() as i32)).sum::<f64>() / checks.len() as f64;
            CoupledExitPoint {
                chi,
                exit_value: Some(exit),
                epsilon: Some(fp.epsilon),
                residual: Some(fp.residual),
                error: (!matches!(fp.outcome, super::Outcome::FixedPoint))
                    .then(|| format!("not converged after {} iterations", fp.iterations)),
            }
        }
        Err(e) => CoupledExitPoint {
            chi,
            exit_value: None,
            epsilon: None,
            residual: None,
            error: Some(e.to_string()),
        },
    }))
}

/// Channel value of the steepest segment of the curve, the location of its
/// "vertical" drop. Segments are consecutive solved points in `chi` order.
pub fn drop_location(curve: &[CoupledExitPoint]) -> Option<f64> {
    let solved: Vec<(f64, f64)> = curve
        .iter()
        .filter_map(|p| Some((p.epsilon?, p.exit_value?)))
        .collect();
    solved
        .windows(2)
        .map(|w| {
            let slope = (w[1].1 - w[0].1).abs() / (w[1].0 - w[0].0).abs().max(f64::MIN_POSITIVE);
            (slope, 0.5 * (w[0].0 + w[1].0))
        })
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, eps)| eps)
}
