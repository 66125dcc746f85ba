use thiserror::Error;

/// Errors produced by the analysis and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("invalid transfer table: {0}")]
    InvalidTransfer(String),

    #[error("bound is vacuous: {0}")]
    VacuousBound(String),

    #[error("bisection could not bracket a root: {0}")]
    Bracket(String),

    #[error("degenerate fixed point: {0}")]
    Degenerate(String),

    #[error("invalid simulation parameters: {0}")]
    InvalidSimulation(String),

    /// Two routes through the detector disagree on a bit value. Never happens
    /// on an erasure channel, so it signals a bug.
    #[error("inconsistent detector state at bit {bit}")]
    Inconsistent { bit: usize },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Checks that `value` lies in the closed unit interval.
pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            domain: "[0, 1]",
        })
    }
}
