use scdec::channel::{dec_transfer, ChannelModel};
use scdec::coupled::CoupledEnsemble;
use scdec::sim::{
    derive_seed, jit_decode, random_bits, run_experiment, sample_graph, simulate_channel, Experiment, GraphEnsemble,
    TannerGraph,
};
use scdec::uncoupled::{stable_fixed_point, RegularEnsemble};

fn decode_residual(graph: &TannerGraph, eps: f64, seed: u64) -> f64 {
    let bits = random_bits(graph.num_vars(), derive_seed(seed, 0));
    let r = simulate_channel(&bits, graph.vars_per_section(), eps, derive_seed(seed, 1)).unwrap();
    jit_decode(graph, &r, 10_000).unwrap().residual_erasure_fraction
}

#[test]
fn sampled_coupled_rate_matches_design_rate() {
    let ens = CoupledEnsemble::new(3, 9, 16, 3).unwrap();
    let design = ens.design_rate().unwrap();
    for seed in 0..3 {
        let g = sample_graph(ens, 10_000, seed).unwrap();
        let rate = g.empirical_rate();
        assert!((rate - design).abs() < 1e-3, "seed {seed}: {rate} vs {design}");
        assert!(g.rate_with_termination() < rate);
    }
}

#[test]
fn every_variable_has_full_degree() {
    let ens = CoupledEnsemble::new(4, 8, 5, 3).unwrap();
    let g = sample_graph(ens, 120, 4).unwrap();
    let mut degree = vec![0usize; g.num_vars()];
    let mut check_load = vec![0usize; g.num_checks()];
    for (v, c, _) in g.edges() {
        degree[v] += 1;
        check_load[c] += 1;
    }
    assert!(degree.iter().all(|&d| d == 4));
    assert!(check_load.iter().all(|&d| d <= 8));
}

#[test]
fn uncoupled_decoding_below_and_above_threshold() {
    let ens = RegularEnsemble::new(5, 15).unwrap();
    let m = 10_000;
    let mut successes = 0;
    for seed in 0..10 {
        let g = sample_graph(ens, m, seed).unwrap();
        if decode_residual(&g, 0.30, seed) == 0.0 {
            successes += 1;
        }
    }
    assert!(successes >= 8, "{successes} of 10 decoded at 0.30");

    // Above threshold the residual settles at the bit erasure probability
    // of the non-zero DE fixed point. Erasure runs on the trellis make a
    // single 10^4-bit realization swing by about 0.02, so use 10^5.
    let ch = ChannelModel::dec(0.45).unwrap();
    let x = stable_fixed_point(&ens, &ch).unwrap();
    let y = 1.0 - (1.0 - x).powi(14);
    let q = y.powi(5);
    let predicted = dec_transfer(0.45, q).unwrap() * q;
    for seed in 0..3 {
        let g = sample_graph(ens, 100_000, seed).unwrap();
        let residual = decode_residual(&g, 0.45, seed);
        assert!((residual - predicted).abs() < 0.01, "{residual} vs {predicted}");
    }
}

#[test]
fn coupling_decodes_where_the_uncoupled_code_fails() {
    let coupled = CoupledEnsemble::new(5, 15, 16, 5).unwrap();
    let m = 2_000;
    let n = m * coupled.sections();
    let uncoupled = RegularEnsemble::new(5, 15).unwrap();
    let (mut coupled_ok, mut uncoupled_ok) = (0, 0);
    for seed in 0..20 {
        let g = sample_graph(coupled, m, seed).unwrap();
        coupled_ok += (decode_residual(&g, 0.48, seed) == 0.0) as usize;
        let g = sample_graph(uncoupled, n, seed).unwrap();
        uncoupled_ok += (decode_residual(&g, 0.48, seed) == 0.0) as usize;
    }
    assert!(coupled_ok > 10, "coupled decoded {coupled_ok} of 20");
    assert_eq!(uncoupled_ok, 0);
}

#[test]
fn identical_seeds_reproduce_everything() {
    let ens = CoupledEnsemble::new(3, 6, 4, 2).unwrap();
    let g1 = sample_graph(ens, 300, 9).unwrap();
    let g2 = sample_graph(ens, 300, 9).unwrap();
    assert_eq!(g1.edges().collect::<Vec<_>>(), g2.edges().collect::<Vec<_>>());
    let bits = random_bits(g1.num_vars(), 1);
    let r1 = simulate_channel(&bits, 300, 0.45, 2).unwrap();
    let r2 = simulate_channel(&bits, 300, 0.45, 2).unwrap();
    assert_eq!(r1, r2);
    assert_eq!(jit_decode(&g1, &r1, 100).unwrap(), jit_decode(&g2, &r2, 100).unwrap());
}

#[test]
fn experiments_are_ordered_and_reproducible() {
    let exp = Experiment {
        ensemble: GraphEnsemble::Regular(RegularEnsemble::new(3, 6).unwrap()),
        vars_per_section: 600,
        epsilons: vec![0.2, 0.3, 0.7],
        seeds: vec![4, 5],
        max_iter: 200,
    };
    let a = run_experiment(&exp).unwrap();
    assert_eq!(a, run_experiment(&exp).unwrap());
    let order: Vec<(u64, f64)> = a.iter().map(|t| (t.seed, t.epsilon)).collect();
    assert_eq!(order, vec![(4, 0.2), (4, 0.3), (4, 0.7), (5, 0.2), (5, 0.3), (5, 0.7)]);
    assert!(a[2].residual_erasure_fraction > a[0].residual_erasure_fraction);
}
