//! Seeded Monte-Carlo sweeps over channel values.
//!
//! Trial `(epsilon_j, seed)` samples its graph from `seed` itself, so all
//! channel values share the graph for a given seed. The channel stream is
//! `derive_seed(seed, j)`; its bits use `derive_seed(stream, 0)` and its
//! erasures `derive_seed(stream, 1)`.

use serde::{Deserialize, Serialize};

use super::channel::{derive_seed, random_bits, simulate_channel};
use super::decoder::jit_decode;
use super::graph::{sample_graph, GraphEnsemble, TannerGraph};
use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    pub ensemble: GraphEnsemble,
    /// Variables per section.
    pub vars_per_section: usize,
    pub epsilons: Vec<f64>,
    pub seeds: Vec<u64>,
    pub max_iter: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub epsilon: f64,
    pub seed: u64,
    pub residual_erasure_fraction: f64,
    pub iterations: usize,
}

/// Decodes one channel realization on `graph`.
pub fn run_trial(graph: &TannerGraph, epsilon: f64, channel_seed: u64, max_iter: usize) -> Result<TrialResult> {
    let bits = random_bits(graph.num_vars(), derive_seed(channel_seed, 0));
    let realization = simulate_channel(&bits, graph.vars_per_section(), epsilon, derive_seed(channel_seed, 1))?;
    let out = jit_decode(graph, &realization, max_iter)?;
    Ok(TrialResult {
        epsilon,
        seed: graph.seed(),
        residual_erasure_fraction: out.residual_erasure_fraction,
        iterations: out.iterations,
    })
}

/// Runs every `(epsilon, seed)` pair; seeds run concurrently. Results are
/// ordered by seed, then by `epsilon` grid position.
pub fn run_experiment(exp: &Experiment) -> Result<Vec<TrialResult>> {
    if exp.epsilons.is_empty() || exp.seeds.is_empty() {
        return Err(Error::InvalidSimulation("empty epsilon grid or seed list".into()));
    }
    let per_seed = par::map(&exp.seeds, |&seed| -> Result<Vec<TrialResult>> {
        let graph = sample_graph(exp.ensemble, exp.vars_per_section, seed)?;
        exp.epsilons
            .iter()
            .enumerate()
            .map(|(j, &eps)| run_trial(&graph, eps, derive_seed(seed, j as u64), exp.max_iter))
            .collect()
    });
    let mut out = Vec::with_capacity(exp.seeds.len() * exp.epsilons.len());
    for r in per_seed {
        out.extend(r?);
    }
    Ok(out)
}
