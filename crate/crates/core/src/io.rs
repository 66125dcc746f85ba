//! CSV writers for curves, traces, constellations and trial results.
//!
//! Unsolved points are written as `NaN` so every row keeps its columns.

use std::io::Write;

use crate::coupled::{Constellation, CoupledExitPoint};
use crate::error::Result;
use crate::sim::TrialResult;
use crate::uncoupled::{DeTrace, ExitPoint};

fn or_nan(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

pub fn write_exit_csv<W: Write>(out: W, curve: &[ExitPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "exit_value", "epsilon"])?;
    for p in curve {
        w.serialize((p.x, p.exit_value, or_nan(p.epsilon)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_coupled_exit_csv<W: Write>(out: W, curve: &[CoupledExitPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["chi", "exit_value", "epsilon"])?;
    for p in curve {
        w.serialize((p.chi, or_nan(p.exit_value), or_nan(p.epsilon)))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the recorded history; a trace without history has only its
/// final value.
pub fn write_trace_csv<W: Write>(out: W, trace: &DeTrace) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["iter", "x"])?;
    match &trace.history {
        Some(h) => {
            for (i, x) in h.iter().enumerate() {
                w.serialize((i, x))?;
            }
        }
        None => w.serialize((trace.iterations, trace.final_x))?,
    }
    w.flush()?;
    Ok(())
}

pub fn write_constellation_csv<W: Write>(out: W, c: &Constellation) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["section", "x"])?;
    for (i, x) in c.iter() {
        w.serialize((i, x))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trials_csv<W: Write>(out: W, trials: &[TrialResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for t in trials {
        w.serialize(t)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unsolved_points_become_nan() {
        let curve = [ExitPoint { x: 0.5, exit_value: 0.1, epsilon: None }];
        let mut buf = Vec::new();
        write_exit_csv(&mut buf, &curve).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,exit_value,epsilon\n0.5,0.1,NaN\n");
    }

    #[test]
    fn trial_header_comes_from_field_names() {
        let t = TrialResult { epsilon: 0.3, seed: 7, residual_erasure_fraction: 0.0, iterations: 4 };
        let mut buf = Vec::new();
        write_trials_csv(&mut buf, &[t]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("epsilon,seed,residual_erasure_fraction,iterations\n0.3,7,0.0,4"));
    }
}
