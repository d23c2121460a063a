mod common;

use common::*;
use fairim_core::{
    required_samples, rng, sample_live_edges, DiffusionModel, EstimatorParams, ExactEvaluator,
};
use proptest::prelude::*;
use rand::Rng;

const IC: DiffusionModel = DiffusionModel::IndependentCascade;

#[test]
fn sampled_sigma_matches_enumeration() {
    let g = random_graph(6, 12, 0.8, 5);
    let exact = ExactEvaluator::new(&g, IC).unwrap();
    let sample = sample_live_edges(&g, IC, 40_000, 6).unwrap();
    let mut rng = rng::seeded(1);
    for _ in 0..20 {
        let s = random_subset(6, &mut rng);
        let est = sample.sigma_set(&s);
        let truth = exact.sigma_set(&s);
        for (a, b) in est.iter().zip(&truth) {
            assert!((a - b).abs() < 0.015, "{s:?}: {a} vs {b}");
        }
    }
}

#[test]
fn node_strategy_estimate_matches_seed_enumeration() {
    let g = random_graph(5, 10, 0.7, 9);
    let exact = ExactEvaluator::new(&g, IC).unwrap();
    let sample = sample_live_edges(&g, IC, 40_000, 10).unwrap();
    let x = [0.3, 0.1, 0.5, 0.0, 0.6];
    let est = sample.sigma_node_strategy(&x);
    let truth = exact.sigma_node_strategy(&x).unwrap();
    for (a, b) in est.iter().zip(&truth) {
        assert!((a - b).abs() < 0.015, "{a} vs {b}");
    }
}

#[test]
fn linear_threshold_sample_matches_enumeration() {
    // In-weights of every node sum to at most one.
    let g = graph(
        4,
        &[(0, 1, 0.4), (2, 1, 0.5), (1, 2, 0.6), (3, 2, 0.2), (2, 3, 0.9), (1, 0, 0.3)],
    );
    let model = DiffusionModel::LinearThreshold;
    let exact = ExactEvaluator::new(&g, model).unwrap();
    let sample = sample_live_edges(&g, model, 40_000, 3).unwrap();
    for s in [vec![0], vec![3], vec![0, 3]] {
        for (a, b) in sample.sigma_set(&s).iter().zip(exact.sigma_set(&s)) {
            assert!((a - b).abs() < 0.015, "{s:?}: {a} vs {b}");
        }
    }
}

#[test]
fn two_node_analytic_values() {
    let exact = ExactEvaluator::new(&two_node(0.5), IC).unwrap();
    let x = exact.sigma_node_strategy(&[0.5, 0.5]).unwrap();
    // 1 - (1 - 0.5)(1 - 0.5 * 0.5)
    assert!((x[0] - 0.625).abs() < 1e-12);
    let p = exact.sigma_distribution([(&[0u32][..], 0.5), (&[1u32][..], 0.5)]);
    assert!((p[0] - 0.75).abs() < 1e-12);
}

// With T from the sample-count bound, the largest error over random (v, S)
// pairs stays within epsilon in most trials.
#[test]
fn sample_count_bound_delivers_accuracy() {
    let (eps, delta) = (0.1, 0.1);
    let mut good = 0;
    let trials = 10;
    for trial in 0..trials {
        let n = 7;
        let g = random_graph(n, 16, 0.9, 100 + trial);
        let exact = ExactEvaluator::new(&g, IC).unwrap();
        let t = required_samples(&EstimatorParams::new(eps, delta), n).unwrap();
        let sample = sample_live_edges(&g, IC, t, 200 + trial).unwrap();
        let mut rng = rng::seeded(300 + trial);
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let s = random_subset(n, &mut rng);
            let v = rng.random_range(0..n);
            worst = worst.max((sample.sigma_set(&s)[v] - exact.sigma_set(&s)[v]).abs());
        }
        if worst <= eps {
            good += 1;
        }
    }
    assert!(good as f64 >= (1.0 - delta) * trials as f64, "{good}/{trials}");
}

#[test]
fn sampling_is_thread_count_independent() {
    let g = random_graph(30, 200, 0.3, 4);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let many = rayon::ThreadPoolBuilder::new().num_threads(6).build().unwrap();
    let a = one.install(|| sample_live_edges(&g, IC, 64, 77).unwrap());
    let b = many.install(|| sample_live_edges(&g, IC, 64, 77).unwrap());
    assert_eq!(a, b);
    assert_eq!(a.sigma_set(&[0, 5]), b.sigma_set(&[0, 5]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sources_reaching_is_path_existence(seed in 0u64..10_000) {
        let g = random_graph(8, 20, 0.7, seed);
        let sample = sample_live_edges(&g, IC, 4, seed).unwrap();
        for t in 0..sample.len() {
            let live = sample.graph(t).live_arcs();
            for v in 0..8u32 {
                // Reverse search over live arcs as the reference.
                let mut seen = [false; 8];
                let mut stack = vec![v];
                seen[v as usize] = true;
                while let Some(u) = stack.pop() {
                    for &(a, b) in live {
                        if b == u && !seen[a as usize] {
                            seen[a as usize] = true;
                            stack.push(a);
                        }
                    }
                }
                let expected: Vec<u32> = (0..8).filter(|&i| seen[i as usize]).collect();
                prop_assert_eq!(sample.sources_reaching(t, v), expected);
            }
        }
    }

    #[test]
    fn sigma_is_monotone(seed in 0u64..10_000) {
        let g = random_graph(9, 24, 0.6, seed);
        let sample = sample_live_edges(&g, IC, 30, seed ^ 1).unwrap();
        let mut rng = rng::seeded(seed);
        let small = random_subset(9, &mut rng);
        let mut large = small.clone();
        large.extend(random_subset(9, &mut rng));
        large.sort_unstable();
        large.dedup();
        let a = sample.sigma_set(&small);
        let b = sample.sigma_set(&large);
        for v in 0..9 {
            prop_assert!(a[v] <= b[v]);
        }
        for &s in &small {
            prop_assert_eq!(a[s as usize], 1.0);
        }
    }

    #[test]
    fn weighted_sigma_is_submodular(seed in 0u64..10_000) {
        let n = 9;
        let g = random_graph(n, 24, 0.6, seed);
        let sample = sample_live_edges(&g, IC, 30, seed ^ 2).unwrap();
        let mut rng = rng::seeded(seed ^ 3);
        let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let f = |s: &[u32]| -> f64 {
            sample.sigma_set(s).iter().zip(&w).map(|(a, b)| a * b).sum()
        };
        let small = random_subset(n, &mut rng);
        let mut large = small.clone();
        large.extend(random_subset(n, &mut rng));
        large.sort_unstable();
        large.dedup();
        if let Some(e) = (0..n as u32).find(|v| !large.contains(v)) {
            let with = |s: &[u32]| { let mut t = s.to_vec(); t.push(e); t };
            let gain_small = f(&with(&small)) - f(&small);
            let gain_large = f(&with(&large)) - f(&large);
            prop_assert!(gain_small >= gain_large - 1e-12);
        }
    }

    #[test]
    fn indicator_strategy_is_bit_identical(seed in 0u64..10_000) {
        let n = 12;
        let g = random_graph(n, 40, 0.5, seed);
        let sample = sample_live_edges(&g, IC, 20, seed).unwrap();
        let mut rng = rng::seeded(seed);
        let s = random_subset(n, &mut rng);
        let mut x = vec![0.0; n];
        for &v in &s {
            x[v as usize] = 1.0;
        }
        let a = sample.sigma_set(&s);
        let b = sample.sigma_node_strategy(&x);
        prop_assert!(a.iter().zip(&b).all(|(p, q)| p.to_bits() == q.to_bits()));
    }
}
