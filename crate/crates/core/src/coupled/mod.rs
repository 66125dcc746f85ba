//! Density evolution for the spatially coupled `(dl, dr, L, w)` ensemble.

mod constellation;
mod ensemble;
mod exit;
mod forward;
mod kernel;
mod reverse;
mod shape;
mod threshold;

pub use constellation::Constellation;
pub use ensemble::CoupledEnsemble;
pub use exit::{drop_location, exit_curve_coupled, CoupledExitPoint};
pub use forward::{
    forward_de_coupled, wave_exit_depth, CoupledFixedPoint, ForwardConfig, ForwardDe, Outcome, Schedule,
    StopRule, COUPLED_DE_TOL, COUPLED_MAX_ITER,
};
pub use reverse::{reverse_de, reverse_de_with, ReverseConfig, REVERSE_MAX_ITER, REVERSE_TOL};
pub use shape::{shape_report, shape_report_for, ShapeReport, SYMMETRY_TOL};
pub use threshold::{jit_threshold_coupled, jit_threshold_coupled_with, jit_thresholds_coupled};

use crate::channel::ChannelModel;
use crate::error::{Error, Result};

/// `f` applied to the channel input of section `i`:
/// `f((1 - avg_j (1 - avg_k x_{i+j-k})^(dr-1))^dl)`.
pub fn coupled_epsilon_i(ens: &CoupledEnsemble, ch: &ChannelModel, x: &Constellation, i: i64) -> Result<f64> {
    check_shape(ens, x)?;
    let l = ens.half_width() as i64;
    if !(-l..=l).contains(&i) {
        return Err(Error::Domain {
            name: "section",
            value: i as f64,
            domain: "[-L, L]",
        });
    }
    let y = kernel::section_check_average(&ens.base(), ens.w() as usize, x.values(), (i + l) as usize);
    Ok(ch.transfer(y.powi(ens.dl() as i32)))
}

/// Parallel-schedule image of `x`.
pub fn coupled_de_update(ens: &CoupledEnsemble, ch: &ChannelModel, x: &Constellation) -> Result<Constellation> {
    check_shape(ens, x)?;
    let mut out = vec![0.0; x.len()];
    coupled_de_update_into(ens, ch, x.values(), &mut out)?;
    Ok(Constellation::from_raw(ens.half_width(), out))
}

/// Slice form of [`coupled_de_update`]. Reads only `x` and writes only
/// `out`; sections beyond the slice count as zero.
pub fn coupled_de_update_into(ens: &CoupledEnsemble, ch: &ChannelModel, x: &[f64], out: &mut [f64]) -> Result<()> {
    if x.len() != ens.sections() || out.len() != ens.sections() {
        return Err(Error::InvalidEnsemble(format!(
            "expected {} sections, got input {} and output {}",
            ens.sections(),
            x.len(),
            out.len()
        )));
    }
    kernel::Kernel::default().update_into(&ens.base(), ens.w() as usize, ch, x, out);
    Ok(())
}

/// `max_i |F(x)_i - x_i|`.
pub fn fixed_point_residual(ens: &CoupledEnsemble, ch: &ChannelModel, x: &Constellation) -> Result<f64> {
    let image = coupled_de_update(ens, ch, x)?;
    Ok(forward::sup_distance(x.values(), image.values()))
}

/// Entropy of a constellation, the mean of its entries.
pub fn entropy(x: &Constellation) -> f64 {
    x.entropy()
}

fn check_shape(ens: &CoupledEnsemble, x: &Constellation) -> Result<()> {
    if x.half_width() != ens.half_width() {
        return Err(Error::InvalidEnsemble(format!(
            "constellation has L = {}, ensemble has L = {}",
            x.half_width(),
            ens.half_width()
        )));
    }
    Ok(())
}
