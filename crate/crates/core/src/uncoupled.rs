//! Density evolution for the uncoupled `(dl, dr)`-regular ensemble under
//! joint iterative decoding: one detector pass per LDPC iteration.

use serde::{Deserialize, Serialize};

use crate::bisect;
use crate::channel::{ChannelFamily, ChannelModel};
use crate::error::{check_probability, Error, Result};
use crate::par;

/// Final values below this count as the zero fixed point.
pub const ZERO_THRESHOLD: f64 = 1e-10;
/// Default stopping tolerance on the change of the DE iterate.
pub const DE_TOL: f64 = 1e-12;
pub const DE_MAX_ITER: usize = 100_000;
/// Default bisection width for threshold searches.
pub const THRESHOLD_TOL: f64 = 1e-7;
pub const EXIT_POINTS: usize = 2001;

/// Variable and check degrees of a regular LDPC ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegularEnsemble {
    dl: u32,
    dr: u32,
}

impl RegularEnsemble {
    pub fn new(dl: u32, dr: u32) -> Result<Self> {
        if dl < 2 || dr < 2 {
            return Err(Error::InvalidEnsemble(format!(
                "degrees must be at least 2, got ({dl}, {dr})"
            )));
        }
        if dl >= dr {
            return Err(Error::InvalidEnsemble(format!(
                "need dl < dr for a positive design rate, got ({dl}, {dr})"
            )));
        }
        Ok(Self { dl, dr })
    }

    pub fn dl(&self) -> u32 {
        self.dl
    }

    pub fn dr(&self) -> u32 {
        self.dr
    }

    pub fn design_rate(&self) -> f64 {
        1.0 - self.dl as f64 / self.dr as f64
    }

    /// Check-to-variable erasure probability given variable-to-check erasure
    /// probability `x`: `1 - (1 - x)^(dr - 1)`.
    #[inline]
    pub(crate) fn check_erasure(&self, x: f64) -> f64 {
        one_minus_pow(x, self.dr - 1)
    }
}

/// `1 - (1 - a)^n` without cancellation for small `a`.
#[inline]
pub(crate) fn one_minus_pow(a: f64, n: u32) -> f64 {
    if a >= 1.0 {
        return 1.0;
    }
    if a > 0.25 {
        1.0 - (1.0 - a).powi(n as i32)
    } else {
        -(n as f64 * (-a).ln_1p()).exp_m1()
    }
}

/// One round of joint iterative DE:
/// `f(y^dl) * y^(dl - 1)` with `y = 1 - (1 - x)^(dr - 1)`.
pub fn de_update(ens: &RegularEnsemble, ch: &ChannelModel, x: f64) -> Result<f64> {
    check_probability("x", x)?;
    Ok(de_update_unchecked(ens, ch, x))
}

#[inline]
pub(crate) fn de_update_unchecked(ens: &RegularEnsemble, ch: &ChannelModel, x: f64) -> f64 {
    let y = ens.check_erasure(x);
    let g = y.powi(ens.dl as i32 - 1);
    ch.transfer(g * y) * g
}

/// Result of a forward DE run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeTrace {
    pub iterations: usize,
    pub final_x: f64,
    pub converged_to_zero: bool,
    /// Hit the iteration cap before the change fell below tolerance.
    pub exhausted: bool,
    /// `x` before the first and after every iteration, when requested.
    pub history: Option<Vec<f64>>,
}

/// Iterates [`de_update`] from `x0` until the change drops below `tol` or
/// `max_iter` rounds have run.
pub fn forward_de(
    ens: &RegularEnsemble,
    ch: &ChannelModel,
    x0: f64,
    tol: f64,
    max_iter: usize,
    record_history: bool,
) -> Result<DeTrace> {
    check_probability("x0", x0)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain {
            name: "tol",
            value: tol,
            domain: "(0, inf)",
        });
    }
    let mut history = record_history.then(|| vec![x0]);
    let mut x = x0;
    let mut iterations = 0;
    let mut exhausted = true;
    while iterations < max_iter {
        let next = de_update_unchecked(ens, ch, x);
        iterations += 1;
        if let Some(h) = history.as_mut() {
            h.push(next);
        }
        let change = (next - x).abs();
        x = next;
        if change < tol {
            exhausted = false;
            break;
        }
    }
    Ok(DeTrace {
        iterations,
        final_x: x,
        converged_to_zero: x < ZERO_THRESHOLD,
        exhausted,
        history,
    })
}

/// Largest stable fixed point reached by forward DE from `x = 1`.
pub fn stable_fixed_point(ens: &RegularEnsemble, ch: &ChannelModel) -> Result<f64> {
    Ok(forward_de(ens, ch, 1.0, DE_TOL, DE_MAX_ITER, false)?.final_x)
}

/// Joint iterative decoding threshold: the supremum of `epsilon` for which
/// forward DE from `x = 1` reaches zero, located by bisection to width
/// `tol_eps`.
pub fn jit_threshold(ens: &RegularEnsemble, family: &ChannelFamily, tol_eps: f64) -> Result<f64> {
    if tol_eps.is_nan() || tol_eps <= 0.0 {
        return Err(Error::Domain {
            name: "tol_eps",
            value: tol_eps,
            domain: "(0, inf)",
        });
    }
    let mut failure = None;
    let t = bisect::last_true(0.0, 1.0, tol_eps, |eps| {
        match family
            .at(eps)
            .and_then(|ch| forward_de(ens, &ch, 1.0, DE_TOL, DE_MAX_ITER, false))
        {
            Ok(trace) => trace.converged_to_zero,
            Err(e) => {
                failure.get_or_insert(e);
                false
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(t),
    }
}

/// Thresholds for several ensembles, computed concurrently.
pub fn jit_thresholds(
    ensembles: &[RegularEnsemble],
    family: &ChannelFamily,
    tol_eps: f64,
) -> Result<Vec<f64>> {
    par::map(ensembles, |ens| jit_threshold(ens, family, tol_eps))
        .into_iter()
        .collect()
}

/// One point of the EXIT-like curve: `x` is a fixed point of DE at channel
/// `epsilon`. `epsilon` is `None` when no channel in `[0, 1]` makes `x` a
/// fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitPoint {
    pub x: f64,
    pub exit_value: f64,
    pub epsilon: Option<f64>,
}

impl ExitPoint {
    pub fn is_solved(&self) -> bool {
        self.epsilon.is_some()
    }
}

/// Channel value at which `x` is a fixed point of DE, if any.
pub fn fixed_point_epsilon(ens: &RegularEnsemble, family: &ChannelFamily, x: f64) -> Option<f64> {
    let y = ens.check_erasure(x);
    let g = y.powi(ens.dl as i32 - 1);
    let channel_input = g * y;
    bisect::solve_increasing(0.0, 1.0, x, 0.0, |eps| family.eval(eps, channel_input) * g)
}

/// Traces all fixed points of DE, parametrised by `x` on the uniform grid
/// `k / n_points`, `k = 1..=n_points`. The ordinate is the probability
/// `(1 - (1 - x)^(dr - 1))^dl` that a bit is erased given the LDPC side.
pub fn exit_curve(ens: &RegularEnsemble, family: &ChannelFamily, n_points: usize) -> Result<Vec<ExitPoint>> {
    if n_points < 2 {
        return Err(Error::Domain {
            name: "n_points",
            value: n_points as f64,
            domain: "[2, inf)",
        });
    }
    Ok(par::map_range(n_points, |k| {
        let x = (k + 1) as f64 / n_points as f64;
        ExitPoint {
            x,
            exit_value: ens.check_erasure(x).powi(ens.dl as i32),
            epsilon: fixed_point_epsilon(ens, family, x),
        }
    }))
}

/// Number of fixed points of DE in `[0, 1]`, counted as sign changes of
/// `de_update(x) - x` on a uniform grid of `grid` points in `(0, 1]` plus
/// the trivial root at zero.
pub fn fixed_point_count(ens: &RegularEnsemble, ch: &ChannelModel, grid: usize) -> usize {
    let mut count = 1;
    let mut prev_sign = 0i8;
    for k in 1..=grid {
        let x = k as f64 / grid as f64;
        let h = de_update_unchecked(ens, ch, x) - x;
        let sign = if h > 0.0 {
            1
        } else if h < 0.0 {
            -1
        } else {
            0
        };
        if sign == 0 {
            continue;
        }
        if prev_sign != 0 && sign != prev_sign {
            count += 1;
        }
        prev_sign = sign;
    }
    count
}

/// Upper bound on the dicode joint iterative threshold that vanishes as the
/// degrees grow at fixed rate.
pub fn lemma2_bound(ens: &RegularEnsemble) -> Result<f64> {
    let s = ((ens.dr - 1) as f64).sqrt();
    let slack = 1.0 - (ens.dl - 1) as f64 * (-s).exp();
    if slack <= 0.0 {
        return Err(Error::VacuousBound(format!(
            "(dl - 1) exp(-sqrt(dr - 1)) >= 1 for ({}, {})",
            ens.dl, ens.dr
        )));
    }
    Ok((1.0 / (s * slack)).sqrt().min(1.0))
}
