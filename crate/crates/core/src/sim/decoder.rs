//! Joint iterative (turbo-equalization) erasure decoder.
//!
//! Each iteration runs one detector pass with the code-side erasure flags
//! as priors, then one round of erasure message passing:
//!
//! * variable to check: known iff the detector's extrinsic output is known
//!   or another incoming check message is known;
//! * check to variable: known iff every other incoming variable message is
//!   known.
//!
//! Flags only ever move from erased to known.

use serde::{Deserialize, Serialize};

use super::channel::ChannelRealization;
use super::detector::trellis_detector_pass;
use super::graph::TannerGraph;
use crate::error::{Error, Result};

/// Message and detector flags after some number of iterations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoderState {
    /// Per edge, variable-to-check message known.
    pub v2c_known: Vec<bool>,
    /// Per edge, check-to-variable message known.
    pub c2v_known: Vec<bool>,
    /// Per bit, detector extrinsic output known.
    pub channel_known: Vec<bool>,
    pub iteration: usize,
}

impl DecoderState {
    fn new(graph: &TannerGraph) -> Self {
        Self {
            v2c_known: vec![false; graph.num_edges()],
            c2v_known: vec![false; graph.num_edges()],
            channel_known: vec![false; graph.num_vars()],
            iteration: 0,
        }
    }

    /// True when every flag known in `earlier` is still known here.
    pub fn dominates(&self, earlier: &DecoderState) -> bool {
        fn covers(now: &[bool], before: &[bool]) -> bool {
            now.iter().zip(before).all(|(&n, &b)| n || !b)
        }
        covers(&self.v2c_known, &earlier.v2c_known)
            && covers(&self.c2v_known, &earlier.c2v_known)
            && covers(&self.channel_known, &earlier.channel_known)
    }
}

/// Erasure fractions recorded after one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationStats {
    pub iteration: usize,
    /// Erased variable-to-check messages; tracks the DE variable `x`.
    pub v2c_erased: f64,
    /// Erased detector outputs.
    pub channel_erased: f64,
    /// Bits not yet resolved.
    pub bits_erased: f64,
    pub known_bits: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    /// Per bit, resolved by the decoder.
    pub resolved: Vec<bool>,
    pub trace: Vec<IterationStats>,
    pub iterations: usize,
    pub residual_erasure_fraction: f64,
    pub final_state: DecoderState,
}

impl DecodeResult {
    pub fn success(&self) -> bool {
        self.resolved.iter().all(|&r| r)
    }
}

/// Runs the joint decoder until no flag changes or `max_iter` iterations.
pub fn jit_decode(graph: &TannerGraph, realization: &ChannelRealization, max_iter: usize) -> Result<DecodeResult> {
    jit_decode_with(graph, realization, max_iter, |_| {})
}

/// As [`jit_decode`], calling `observe` with the state after every
/// iteration.
pub fn jit_decode_with<F>(
    graph: &TannerGraph,
    realization: &ChannelRealization,
    max_iter: usize,
    mut observe: F,
) -> Result<DecodeResult>
where
    F: FnMut(&DecoderState),
{
    if graph.num_vars() != realization.bits().len() || graph.vars_per_section() != realization.section_len() {
        return Err(Error::InvalidSimulation(format!(
            "graph has {} variables in sections of {}, realization has {} bits in sections of {}",
            graph.num_vars(),
            graph.vars_per_section(),
            realization.bits().len(),
            realization.section_len()
        )));
    }
    let dl = graph.dl();
    let n = graph.num_vars();
    let mut state = DecoderState::new(graph);
    let mut trace = Vec::new();
    let mut prior_erased = vec![true; n];

    while state.iteration < max_iter {
        let mut changed = false;

        for (v, p) in prior_erased.iter_mut().enumerate() {
            *p = !state.c2v_known[v * dl..(v + 1) * dl].iter().any(|&k| k);
        }
        let extrinsic = trellis_detector_pass(realization, &prior_erased)?;
        for (known, &erased) in state.channel_known.iter_mut().zip(&extrinsic) {
            if !erased && !*known {
                *known = true;
                changed = true;
            }
        }

        for v in 0..n {
            let edges = v * dl..(v + 1) * dl;
            let from_checks = state.c2v_known[edges.clone()].iter().filter(|&&k| k).count();
            for e in edges {
                let others = from_checks - state.c2v_known[e] as usize;
                if !state.v2c_known[e] && (state.channel_known[v] || others > 0) {
                    state.v2c_known[e] = true;
                    changed = true;
                }
            }
        }

        for c in 0..graph.num_checks() {
            let edges = graph.check_edges(c);
            let unknown = edges.iter().filter(|&&e| !state.v2c_known[e as usize]).count();
            if unknown > 1 {
                continue;
            }
            for &e in edges {
                let e = e as usize;
                if !state.c2v_known[e] && unknown - (!state.v2c_known[e]) as usize == 0 {
                    state.c2v_known[e] = true;
                    changed = true;
                }
            }
        }

        state.iteration += 1;
        trace.push(stats(graph, &state));
        observe(&state);
        if !changed {
            break;
        }
    }

    let resolved = resolved_bits(graph, &state);
    let residual = resolved.iter().filter(|&&r| !r).count() as f64 / n as f64;
    Ok(DecodeResult {
        resolved,
        iterations: state.iteration,
        residual_erasure_fraction: residual,
        trace,
        final_state: state,
    })
}

fn resolved_bits(graph: &TannerGraph, state: &DecoderState) -> Vec<bool> {
    let dl = graph.dl();
    (0..graph.num_vars())
        .map(|v| state.channel_known[v] || state.c2v_known[v * dl..(v + 1) * dl].iter().any(|&k| k))
        .collect()
}

fn stats(graph: &TannerGraph, state: &DecoderState) -> IterationStats {
    let edges = graph.num_edges() as f64;
    let n = graph.num_vars();
    let known_bits = resolved_bits(graph, state).iter().filter(|&&r| r).count();
    IterationStats {
        iteration: state.iteration,
        v2c_erased: state.v2c_known.iter().filter(|&&k| !k).count() as f64 / edges,
        channel_erased: state.channel_known.iter().filter(|&&k| !k).count() as f64 / n as f64,
        bits_erased: (n - known_bits) as f64 / n as f64,
        known_bits,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelModel;
    use crate::sim::{random_bits, sample_graph, simulate_channel};
    use crate::uncoupled::{forward_de, RegularEnsemble};

    fn decode(m: usize, eps: f64, seed: u64) -> DecodeResult {
        let ens = RegularEnsemble::new(5, 15).unwrap();
        let g = sample_graph(ens, m, seed).unwrap();
        let r = simulate_channel(&random_bits(m, seed + 1), m, eps, seed + 2).unwrap();
        jit_decode(&g, &r, 500).unwrap()
    }

    #[test]
    fn message_erasures_track_density_evolution() {
        // At 0.34 the recursion is close enough to threshold that a single
        // realization's early fluctuation is amplified, so the comparison
        // is against the mean over seeds.
        use crate::sim::derive_seed;
        let ens = RegularEnsemble::new(5, 15).unwrap();
        let ch = ChannelModel::dec(0.34).unwrap();
        let mut de = forward_de(&ens, &ch, 1.0, 1e-300, 20, true).unwrap().history.unwrap();
        de.resize(21, 0.0);
        let (m, seeds) = (100_000, 10);
        let mut mean = [0.0; 20];
        for s in 0..seeds {
            let g = sample_graph(ens, m, derive_seed(s, 0)).unwrap();
            let r = simulate_channel(&random_bits(m, derive_seed(s, 1)), m, 0.34, derive_seed(s, 2)).unwrap();
            let out = jit_decode(&g, &r, 20).unwrap();
            for (t, acc) in mean.iter_mut().enumerate() {
                *acc += out.trace.get(t).map_or(0.0, |x| x.v2c_erased) / seeds as f64;
            }
        }
        for (t, v) in mean.iter().enumerate() {
            assert!((v - de[t + 1]).abs() < 0.01, "iteration {t}: {v} vs {}", de[t + 1]);
        }
    }

    #[test]
    fn decodes_below_threshold_only() {
        let good = decode(20_000, 0.30, 3);
        assert!(good.success());
        assert_eq!(good.residual_erasure_fraction, 0.0);
        let bad = decode(20_000, 0.45, 3);
        assert!(bad.residual_erasure_fraction > 0.1);
    }

    #[test]
    fn flags_only_become_known() {
        let ens = RegularEnsemble::new(3, 6).unwrap();
        let g = sample_graph(ens, 2_000, 5).unwrap();
        let r = simulate_channel(&random_bits(2_000, 6), 2_000, 0.4, 7).unwrap();
        let mut prev: Option<DecoderState> = None;
        let out = jit_decode_with(&g, &r, 200, |s| {
            if let Some(p) = &prev {
                assert!(s.dominates(p));
            }
            prev = Some(s.clone());
        })
        .unwrap();
        assert!(out.trace.windows(2).all(|w| w[1].known_bits >= w[0].known_bits));
    }

    #[test]
    fn mismatched_shapes_rejected() {
        let ens = RegularEnsemble::new(3, 6).unwrap();
        let g = sample_graph(ens, 100, 5).unwrap();
        let r = simulate_channel(&random_bits(50, 6), 50, 0.4, 7).unwrap();
        assert!(matches!(jit_decode(&g, &r, 10), Err(Error::InvalidSimulation(_))));
    }
}
