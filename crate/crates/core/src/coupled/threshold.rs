use super::ensemble::CoupledEnsemble;
use super::forward::{forward_de_coupled, ForwardConfig};
use crate::bisect;
use crate::channel::ChannelFamily;
use crate::error::{Error, Result};
use crate::par;

/// Joint iterative threshold of the coupled ensemble: the supremum of
/// `epsilon` for which forward DE from all-ones decodes, by bisection to
/// width `tol_eps`. Uses [`ForwardConfig::for_threshold`].
pub fn jit_threshold_coupled(ens: &CoupledEnsemble, family: &ChannelFamily, tol_eps: f64) -> Result<f64> {
    jit_threshold_coupled_with(ens, family, tol_eps, &ForwardConfig::for_threshold(ens))
}

/// As [`jit_threshold_coupled`] with an explicit inner solver
/// configuration. Runs that exhaust the iteration budget count as
/// failures.
pub fn jit_threshold_coupled_with(
    ens: &CoupledEnsemble,
    family: &ChannelFamily,
    tol_eps: f64,
    config: &ForwardConfig,
) -> Result<f64> {
    if tol_eps.is_nan() || tol_eps <= 0.0 {
        return Err(Error::Domain {
            name: "tol_eps",
            value: tol_eps,
            domain: "(0, inf)",
        });
    }
    let mut failure = None;
    let t = bisect::last_true(0.0, 1.0, tol_eps, |eps| {
        match family.at(eps).and_then(|ch| forward_de_coupled(ens, &ch, config)) {
            Ok(fp) => fp.outcome.decodes(),
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

/// Thresholds for several ensembles, one worker per ensemble.
pub fn jit_thresholds_coupled(
    ensembles: &[CoupledEnsemble],
    family: &ChannelFamily,
    tol_eps: f64,
) -> Result<Vec<f64>> {
    par::map(ensembles, |ens| jit_threshold_coupled(ens, family, tol_eps))
        .into_iter()
        .collect()
}
