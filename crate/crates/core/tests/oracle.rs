mod common;

use common::*;
use fairim_core::oracle::weights_from_community_duals;
use fairim_core::{
    greedy_weighted_im, rng, sample_live_edges, CommunityStructure, DiffusionModel, LiveEdgeSample,
    NodeWeights,
};
use proptest::prelude::*;
use rand::Rng;

const IC: DiffusionModel = DiffusionModel::IndependentCascade;

fn weighted(sample: &LiveEdgeSample, w: &[f64], s: &[u32]) -> f64 {
    sample.sigma_set(s).iter().zip(w).map(|(a, b)| a * b).sum()
}

/// Plain greedy: re-evaluates every candidate through `sigma_set` in every
/// round; ties go to the lowest id.
fn naive_greedy(sample: &LiveEdgeSample, w: &[f64], k: usize) -> Vec<u32> {
    let mut chosen: Vec<u32> = Vec::new();
    for _ in 0..k {
        let base = weighted(sample, w, &chosen);
        let mut best: Option<(f64, u32)> = None;
        for v in 0..sample.n() as u32 {
            if chosen.contains(&v) {
                continue;
            }
            let mut s = chosen.clone();
            s.push(v);
            let gain = weighted(sample, w, &s) - base;
            if best.is_none_or(|(g, _)| gain > g + 1e-12) {
                best = Some((gain, v));
            }
        }
        chosen.push(best.unwrap().1);
    }
    chosen
}

fn random_instance(seed: u64) -> (LiveEdgeSample, Vec<f64>, usize) {
    let mut rng = rng::seeded(seed);
    let n = rng.random_range(3..=8);
    let g = random_graph(n, 2 * n, 0.6, seed);
    let sample = sample_live_edges(&g, IC, 25, seed + 1).unwrap();
    let w = (0..n).map(|_| rng.random::<f64>() * 3.0).collect();
    let k = rng.random_range(1..=3.min(n));
    (sample, w, k)
}

#[test]
fn greedy_beats_one_minus_inverse_e_of_brute_force() {
    for seed in 0..50 {
        let (sample, w, k) = random_instance(seed);
        let trace = greedy_weighted_im(&sample, &NodeWeights::new(w.clone()).unwrap(), k).unwrap();
        let best = subsets_of_size(sample.n(), k)
            .iter()
            .map(|s| weighted(&sample, &w, s))
            .fold(0.0, f64::max);
        let bound = (1.0 - (-1.0f64).exp()) * best;
        assert!(trace.value(k) >= bound - 1e-12, "seed {seed}: {} < {bound}", trace.value(k));
        assert!((trace.value(k) - weighted(&sample, &w, trace.prefix(k))).abs() < 1e-9);
    }
}

#[test]
fn lazy_greedy_equals_naive_greedy() {
    for seed in 100..150 {
        let (sample, w, k) = random_instance(seed);
        let trace = greedy_weighted_im(&sample, &NodeWeights::new(w.clone()).unwrap(), k).unwrap();
        assert_eq!(trace.order(), naive_greedy(&sample, &w, k).as_slice(), "seed {seed}");
    }
}

#[test]
fn unit_weights_are_plain_influence_maximization() {
    let g = random_graph(8, 20, 0.5, 3);
    let sample = sample_live_edges(&g, IC, 50, 4).unwrap();
    let trace = greedy_weighted_im(&sample, &NodeWeights::ones(8), 3).unwrap();
    for i in 1..=3 {
        let spread: f64 = sample.sigma_set(trace.prefix(i)).iter().sum();
        assert!((trace.value(i) - spread).abs() < 1e-9);
    }
    assert_eq!(trace.order(), naive_greedy(&sample, &[1.0; 8], 3).as_slice());
}

#[test]
fn duals_aggregate_into_node_weights() {
    let c = CommunityStructure::new(5, vec![vec![0, 1], vec![1], vec![2, 3, 4]]).unwrap();
    let w = weights_from_community_duals(&[1.0, 1.0, 3.0], &c).unwrap();
    assert_eq!(w.as_slice(), &[0.5, 1.5, 1.0, 1.0, 1.0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn trace_gains_are_non_increasing(seed in 0u64..10_000) {
        let mut rng = rng::seeded(seed);
        let n = 14;
        let g = random_graph(n, 40, 0.5, seed);
        let sample = sample_live_edges(&g, IC, 20, seed).unwrap();
        let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let trace = greedy_weighted_im(&sample, &NodeWeights::new(w).unwrap(), n).unwrap();
        let gains = trace.gains();
        for pair in gains.windows(2) {
            prop_assert!(pair[1] <= pair[0] + 1e-12);
        }
        for pair in trace.values().windows(2) {
            prop_assert!(pair[1] >= pair[0]);
        }
    }

    #[test]
    fn scaling_weights_keeps_the_trace(seed in 0u64..10_000, scale in 0.01f64..100.0) {
        let mut rng = rng::seeded(seed);
        let n = 10;
        let g = random_graph(n, 30, 0.5, seed);
        let sample = sample_live_edges(&g, IC, 20, seed).unwrap();
        let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let scaled: Vec<f64> = w.iter().map(|x| x * scale).collect();
        let a = greedy_weighted_im(&sample, &NodeWeights::new(w).unwrap(), 4).unwrap();
        let b = greedy_weighted_im(&sample, &NodeWeights::new(scaled).unwrap(), 4).unwrap();
        prop_assert_eq!(a.order(), b.order());
    }
}
