//! Tanner graph sampling for regular and coupled ensembles.
//!
//! Variables live in sections `0..S` (section `p` is chain position
//! `p - L`), `M` per section. Check positions run over `0..S + w - 1`; a
//! variable edge from section `p` lands on position `p + o`, `o in 0..w`.
//!
//! Offsets are balanced per section: each of the `w` offsets receives
//! `floor(M dl / w)` of the section's `M dl` edge stubs, any remainder goes
//! to distinct random offsets, and the stubs are then shuffled, so every
//! single edge sees a uniform offset. Each position carries
//! `ceil(M dl / dr)` checks of `dr` sockets (more if the remainder
//! overflows them) and incoming stubs take uniformly random free sockets.
//! Sockets left empty make boundary checks underfull; checks with no edge
//! at all are not part of the code.
//!
//! # Edge-list dump format
//!
//! ```text
//! # scdec tanner graph v1
//! dl dr sections vars_per_section w seed
//! variables checks edges
//! variable check slot        (one line per edge, variable-major)
//! check position             (one line per check)
//! ```
//!
//! Lines starting with `#` are comments. `slot` is the socket index inside
//! the check, `0..dr`; `position` is the check's chain position in
//! `0..sections + w - 1`.

use std::io::{BufRead, Write};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coupled::CoupledEnsemble;
use crate::error::{Error, Result};
use crate::uncoupled::RegularEnsemble;

/// Ensemble a graph is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GraphEnsemble {
    Regular(RegularEnsemble),
    Coupled(CoupledEnsemble),
}

impl GraphEnsemble {
    pub fn dl(&self) -> u32 {
        match self {
            GraphEnsemble::Regular(e) => e.dl(),
            GraphEnsemble::Coupled(e) => e.dl(),
        }
    }

    pub fn dr(&self) -> u32 {
        match self {
            GraphEnsemble::Regular(e) => e.dr(),
            GraphEnsemble::Coupled(e) => e.dr(),
        }
    }

    pub fn sections(&self) -> usize {
        match self {
            GraphEnsemble::Regular(_) => 1,
            GraphEnsemble::Coupled(e) => e.sections(),
        }
    }

    pub fn w(&self) -> usize {
        match self {
            GraphEnsemble::Regular(_) => 1,
            GraphEnsemble::Coupled(e) => e.w() as usize,
        }
    }
}

impl From<RegularEnsemble> for GraphEnsemble {
    fn from(e: RegularEnsemble) -> Self {
        GraphEnsemble::Regular(e)
    }
}

impl From<CoupledEnsemble> for GraphEnsemble {
    fn from(e: CoupledEnsemble) -> Self {
        GraphEnsemble::Coupled(e)
    }
}

/// A sampled Tanner graph. Edge `e` is the `e % dl`-th edge of variable
/// `e / dl`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerGraph {
    dl: usize,
    dr: usize,
    sections: usize,
    vars_per_section: usize,
    w: usize,
    seed: u64,
    /// Check attached to each edge.
    edge_check: Vec<u32>,
    /// Socket slot of each edge inside its check.
    edge_slot: Vec<u8>,
    /// CSR adjacency from checks to edges.
    check_start: Vec<usize>,
    check_edges: Vec<u32>,
    /// Chain position (`0..S + w - 1`) of each check.
    check_position: Vec<u32>,
}

impl TannerGraph {
    pub fn dl(&self) -> usize {
        self.dl
    }

    pub fn dr(&self) -> usize {
        self.dr
    }

    pub fn sections(&self) -> usize {
        self.sections
    }

    pub fn vars_per_section(&self) -> usize {
        self.vars_per_section
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn num_vars(&self) -> usize {
        self.sections * self.vars_per_section
    }

    pub fn num_checks(&self) -> usize {
        self.check_position.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edge_check.len()
    }

    /// Section of variable `v`.
    pub fn section_of(&self, v: usize) -> usize {
        v / self.vars_per_section
    }

    pub fn check_position(&self, c: usize) -> usize {
        self.check_position[c] as usize
    }

    pub fn edge_check(&self, e: usize) -> usize {
        self.edge_check[e] as usize
    }

    /// Edges attached to check `c`.
    pub fn check_edges(&self, c: usize) -> &[u32] {
        &self.check_edges[self.check_start[c]..self.check_start[c + 1]]
    }

    pub fn check_degree(&self, c: usize) -> usize {
        self.check_start[c + 1] - self.check_start[c]
    }

    /// `(variable, check, slot)` triples in edge order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.num_edges()).map(move |e| (e / self.dl, self.edge_check[e] as usize, self.edge_slot[e] as usize))
    }

    /// Checks with at least one edge.
    pub fn active_checks(&self) -> usize {
        (0..self.num_checks()).filter(|&c| self.check_degree(c) > 0).count()
    }

    /// `1 - active checks / variables`.
    pub fn empirical_rate(&self) -> f64 {
        1.0 - self.active_checks() as f64 / self.num_vars() as f64
    }

    /// Rate after charging one known flush symbol per section.
    pub fn rate_with_termination(&self) -> f64 {
        let info = self.num_vars() as f64 - self.active_checks() as f64;
        info / (self.num_vars() + self.sections) as f64
    }

    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# scdec tanner graph v1")?;
        writeln!(out, "# dl dr sections vars_per_section w seed")?;
        writeln!(
            out,
            "{} {} {} {} {} {}",
            self.dl, self.dr, self.sections, self.vars_per_section, self.w, self.seed
        )?;
        writeln!(out, "# variables checks edges")?;
        writeln!(out, "{} {} {}", self.num_vars(), self.num_checks(), self.num_edges())?;
        writeln!(out, "# variable check slot")?;
        for (v, c, s) in self.edges() {
            writeln!(out, "{v} {c} {s}")?;
        }
        writeln!(out, "# check position")?;
        for (c, q) in self.check_position.iter().enumerate() {
            writeln!(out, "{c} {q}")?;
        }
        Ok(())
    }

    /// Parses the format written by [`TannerGraph::write_edge_list`].
    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidSimulation(format!("edge list: {msg}"));
        let mut rows = input.lines().filter(|l| match l {
            Ok(l) => !l.trim_start().starts_with('#') && !l.trim().is_empty(),
            Err(_) => true,
        });
        let mut numbers = |expect: usize| -> Result<Vec<u64>> {
            let line = rows.next().ok_or_else(|| bad("unexpected end of input"))??;
            let v = line
                .split_whitespace()
                .map(|t| t.parse::<u64>().map_err(|_| bad(&format!("bad number {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            if v.len() != expect {
                return Err(bad(&format!("expected {expect} fields, got {}", v.len())));
            }
            Ok(v)
        };
        let h = numbers(6)?;
        let (dl, dr, sections, m, w, seed) = (h[0] as usize, h[1] as usize, h[2] as usize, h[3] as usize, h[4] as usize, h[5]);
        let c = numbers(3)?;
        let (num_vars, num_checks, num_edges) = (c[0] as usize, c[1] as usize, c[2] as usize);
        if num_vars != sections * m || num_edges != num_vars * dl {
            return Err(bad("inconsistent counts"));
        }
        let mut edge_check = Vec::with_capacity(num_edges);
        let mut edge_slot = Vec::with_capacity(num_edges);
        for e in 0..num_edges {
            let r = numbers(3)?;
            if r[0] as usize != e / dl || r[1] as usize >= num_checks || r[2] as usize >= dr {
                return Err(bad(&format!("edge {e} out of range")));
            }
            edge_check.push(r[1] as u32);
            edge_slot.push(r[2] as u8);
        }
        let mut check_position = Vec::with_capacity(num_checks);
        for c in 0..num_checks {
            let r = numbers(2)?;
            if r[0] as usize != c || r[1] as usize >= sections + w - 1 {
                return Err(bad(&format!("check {c} position out of range")));
            }
            check_position.push(r[1] as u32);
        }
        Ok(Self::assemble(dl, dr, sections, m, w, seed, edge_check, edge_slot, check_position))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        dl: usize,
        dr: usize,
        sections: usize,
        vars_per_section: usize,
        w: usize,
        seed: u64,
        edge_check: Vec<u32>,
        edge_slot: Vec<u8>,
        check_position: Vec<u32>,
    ) -> Self {
        let num_checks = check_position.len();
        let mut check_start = vec![0usize; num_checks + 1];
        for &c in &edge_check {
            check_start[c as usize + 1] += 1;
        }
        for c in 0..num_checks {
            check_start[c + 1] += check_start[c];
        }
        let mut fill = check_start.clone();
        let mut check_edges = vec![0u32; edge_check.len()];
        for (e, &c) in edge_check.iter().enumerate() {
            check_edges[fill[c as usize]] = e as u32;
            fill[c as usize] += 1;
        }
        Self {
            dl,
            dr,
            sections,
            vars_per_section,
            w,
            seed,
            edge_check,
            edge_slot,
            check_start,
            check_edges,
            check_position,
        }
    }
}

/// Draws a graph with `vars_per_section` variables in every section.
/// Deterministic in `seed`.
pub fn sample_graph(ens: impl Into<GraphEnsemble>, vars_per_section: usize, seed: u64) -> Result<TannerGraph> {
    let ens = ens.into();
    let m = vars_per_section;
    if m == 0 {
        return Err(Error::InvalidSimulation("M must be positive".into()));
    }
    let (dl, dr, sections, w) = (ens.dl() as usize, ens.dr() as usize, ens.sections(), ens.w());
    if dr > u8::MAX as usize + 1 {
        return Err(Error::InvalidSimulation(format!("check degree {dr} too large")));
    }
    let total_edges = sections * m * dl;
    if total_edges > u32::MAX as usize {
        return Err(Error::InvalidSimulation(format!("{total_edges} edges exceed the supported size")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = sections + w - 1;
    let stubs = m * dl;

    // Offset of every edge stub, section by section.
    let offsets: Vec<usize> = (0..w).collect();
    let mut edge_position = vec![0u32; total_edges];
    let mut incoming = vec![0usize; positions];
    let mut section_offsets = Vec::with_capacity(stubs);
    for p in 0..sections {
        section_offsets.clear();
        for o in 0..w {
            section_offsets.extend(std::iter::repeat_n(o, stubs / w));
        }
        section_offsets.extend(offsets.choose_multiple(&mut rng, stubs % w).copied());
        section_offsets.shuffle(&mut rng);
        for (k, &o) in section_offsets.iter().enumerate() {
            edge_position[p * stubs + k] = (p + o) as u32;
            incoming[p + o] += 1;
        }
    }

    let base_checks = (m * dl).div_ceil(dr);
    let mut first_check = Vec::with_capacity(positions + 1);
    let mut check_position = Vec::new();
    first_check.push(0usize);
    for (q, &inc) in incoming.iter().enumerate() {
        let count = base_checks.max(inc.div_ceil(dr));
        check_position.extend(std::iter::repeat_n(q as u32, count));
        first_check.push(first_check[q] + count);
    }

    // Uniform free sockets: shuffle each position's socket list and hand
    // them out in edge order.
    let mut sockets: Vec<Vec<u32>> = (0..positions)
        .map(|q| {
            let n = (first_check[q + 1] - first_check[q]) * dr;
            let mut s: Vec<u32> = (0..n as u32).collect();
            s.shuffle(&mut rng);
            s
        })
        .collect();
    let mut edge_check = vec![0u32; total_edges];
    let mut edge_slot = vec![0u8; total_edges];
    for e in 0..total_edges {
        let q = edge_position[e] as usize;
        let s = sockets[q].pop().expect("socket capacity covers incoming edges") as usize;
        edge_check[e] = (first_check[q] + s / dr) as u32;
        edge_slot[e] = (s % dr) as u8;
    }

    Ok(TannerGraph::assemble(dl, dr, sections, m, w, seed, edge_check, edge_slot, check_position))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_coupling_is_full() {
        let ens = CoupledEnsemble::new(3, 9, 1, 1).unwrap();
        let g = sample_graph(ens, 9, 7).unwrap();
        assert_eq!(g.sections(), 3);
        assert_eq!(g.num_checks(), 9);
        for c in 0..g.num_checks() {
            assert_eq!(g.check_degree(c), 9);
        }
    }

    #[test]
    fn degrees_and_offsets() {
        let ens = CoupledEnsemble::new(3, 9, 4, 3).unwrap();
        let g = sample_graph(ens, 30, 11).unwrap();
        let mut deg = vec![0; g.num_vars()];
        for (v, c, s) in g.edges() {
            deg[v] += 1;
            let p = g.section_of(v);
            let q = g.check_position(c);
            assert!(q >= p && q < p + 3);
            assert!(s < 9);
        }
        assert!(deg.iter().all(|&d| d == 3));
        assert!((0..g.num_checks()).all(|c| g.check_degree(c) <= 9));
        // Each socket is used at most once.
        let mut seen = std::collections::HashSet::new();
        for (_, c, s) in g.edges() {
            assert!(seen.insert((c, s)));
        }
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let ens = CoupledEnsemble::new(5, 15, 3, 5).unwrap();
        let a = sample_graph(ens, 60, 3).unwrap();
        let b = sample_graph(ens, 60, 3).unwrap();
        let c = sample_graph(ens, 60, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_empty_sections() {
        let ens = RegularEnsemble::new(3, 6).unwrap();
        assert!(sample_graph(ens, 0, 1).is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let ens = CoupledEnsemble::new(3, 9, 2, 3).unwrap();
        let g = sample_graph(ens, 12, 5).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# scdec tanner graph v1\n"));
        let back = TannerGraph::read_edge_list(&buf[..]).unwrap();
        assert_eq!(back, g);
        assert!(TannerGraph::read_edge_list(&b"3 9 5 12 3 5\n"[..]).is_err());
    }
}
