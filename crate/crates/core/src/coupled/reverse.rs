//! Entropy-constrained ("reverse") density evolution.
//!
//! Each outer step computes the check averages of the current
//! constellation, then picks the channel `epsilon` for which the updated
//! constellation has entropy exactly `chi`. The transfer function is
//! monotone in `epsilon`, so the inner search is a bisection. The
//! iteration settles on fixed points that forward DE cannot reach.

use serde::{Deserialize, Serialize};

use super::constellation::{entropy, Constellation};
use super::ensemble::CoupledEnsemble;
use super::forward::{sup_distance, CoupledFixedPoint, Outcome};
use super::kernel::Kernel;
use crate::bisect;
use crate::channel::ChannelFamily;
use crate::error::{Error, Result};

pub const REVERSE_TOL: f64 = 1e-12;
pub const REVERSE_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReverseConfig {
    /// Bound on both the sup-change of the constellation and the entropy
    /// mismatch.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ReverseConfig {
    fn default() -> Self {
        Self {
            tol: REVERSE_TOL,
            max_iter: REVERSE_MAX_ITER,
        }
    }
}

/// Finds a fixed point with entropy `chi`, starting from the constant
/// constellation `chi`. When no channel can sustain that start (small
/// `chi` on a long chain), retries from a centred block of ones with the
/// same entropy.
pub fn reverse_de(ens: &CoupledEnsemble, family: &ChannelFamily, chi: f64, tol: f64) -> Result<CoupledFixedPoint> {
    reverse_de_with(
        ens,
        family,
        chi,
        &ReverseConfig {
            tol,
            ..ReverseConfig::default()
        },
        None,
    )
}

/// Reverse DE with an explicit configuration and optional starting
/// constellation.
pub fn reverse_de_with(
    ens: &CoupledEnsemble,
    family: &ChannelFamily,
    chi: f64,
    config: &ReverseConfig,
    start: Option<&Constellation>,
) -> Result<CoupledFixedPoint> {
    if !(chi > 0.0 && chi < 1.0) {
        return Err(Error::Domain {
            name: "chi",
            value: chi,
            domain: "(0, 1)",
        });
    }
    if config.tol.is_nan() || config.tol <= 0.0 {
        return Err(Error::Domain {
            name: "tol",
            value: config.tol,
            domain: "(0, inf)",
        });
    }
    let n = ens.sections();
    match start {
        Some(c) if c.half_width() == ens.half_width() => run(ens, family, chi, config, c.values().to_vec()),
        Some(c) => Err(Error::InvalidEnsemble(format!(
            "start constellation has L = {}, ensemble has L = {}",
            c.half_width(),
            ens.half_width()
        ))),
        None => match run(ens, family, chi, config, vec![chi; n]) {
            Err(Error::Bracket(_)) => run(ens, family, chi, config, centred_block(n, chi)),
            other => other,
        },
    }
}

/// Symmetric constellation of ones around section 0 with entropy `chi`;
/// the fractional remainder is split over the two flanking sections.
fn centred_block(n: usize, chi: f64) -> Vec<f64> {
    let mass = chi * n as f64;
    let mut x = vec![0.0; n];
    let mid = n / 2;
    // Ones on mid - k..=mid + k, leaving `rest` for the two neighbours.
    let k = (((mass - 1.0) / 2.0).floor().max(0.0) as usize).min(mid);
    for v in &mut x[mid - k..=mid + k] {
        *v = 1.0;
    }
    let rest = mass - (2 * k + 1) as f64;
    if rest < 0.0 {
        x[mid] = mass;
    } else if k < mid {
        x[mid - k - 1] = 0.5 * rest;
        x[mid + k + 1] = 0.5 * rest;
    }
    x
}

fn run(
    ens: &CoupledEnsemble,
    family: &ChannelFamily,
    chi: f64,
    config: &ReverseConfig,
    mut x: Vec<f64>,
) -> Result<CoupledFixedPoint> {
    let n = ens.sections();
    let base = ens.base();
    let w = ens.w() as usize;
    let dl = base.dl() as i32;
    let mut kernel = Kernel::default();
    let mut checks = Vec::with_capacity(n);
    let mut gains = vec![0.0; n];
    let mut inputs = vec![0.0; n];
    let mut next = vec![0.0; n];
    let target = chi * n as f64;
    let mut epsilon = f64::NAN;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_iter {
        kernel.check_averages_into(&base, w, &x, &mut checks);
        for ((g, c), &y) in gains.iter_mut().zip(inputs.iter_mut()).zip(&checks) {
            *g = y.powi(dl - 1);
            *c = *g * y;
        }
        let mass = |eps: f64| -> f64 {
            inputs
                .iter()
                .zip(&gains)
                .map(|(&c, &g)| family.eval(eps, c) * g)
                .sum()
        };
        epsilon = match bisect::solve_increasing(0.0, 1.0, target, 0.0, mass) {
            Some(e) => e,
            None => {
                return Err(Error::Bracket(format!(
                    "entropy {chi} unreachable at iteration {iterations}: channel range [0, 1] gives \
                     entropies [{:.6}, {:.6}] for the current constellation (L = {}, w = {})",
                    mass(0.0) / n as f64,
                    mass(1.0) / n as f64,
                    ens.half_width(),
                    ens.w()
                )))
            }
        };
        for ((out, &c), &g) in next.iter_mut().zip(&inputs).zip(&gains) {
            *out = family.eval(epsilon, c) * g;
        }
        let change = sup_distance(&x, &next);
        std::mem::swap(&mut x, &mut next);
        iterations += 1;
        if change < config.tol && (entropy(&x) - chi).abs() < config.tol {
            converged = true;
            break;
        }
    }

    let ch = family.at(epsilon)?;
    let mut image = vec![0.0; n];
    kernel.update_into(&base, w, &ch, &x, &mut image);
    let residual = sup_distance(&x, &image);
    Ok(CoupledFixedPoint {
        epsilon,
        entropy: entropy(&x),
        residual,
        iterations,
        outcome: if converged {
            Outcome::FixedPoint
        } else {
            Outcome::Exhausted
        },
        constellation: Constellation::from_raw(ens.half_width(), x),
    })
}
