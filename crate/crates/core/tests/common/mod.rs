#![allow(dead_code)]

use fairim_core::rng;
use fairim_core::{Arc, DirectedWeightedGraph};
use rand::Rng;

pub fn graph(n: usize, arcs: &[(u32, u32, f64)]) -> DirectedWeightedGraph {
    DirectedWeightedGraph::new(
        n,
        arcs.iter()
            .map(|&(source, target, weight)| Arc { source, target, weight })
            .collect(),
    )
    .unwrap()
}

pub fn two_node(w: f64) -> DirectedWeightedGraph {
    graph(2, &[(0, 1, w), (1, 0, w)])
}

/// Random directed graph on `n` nodes with at most `max_arcs` arcs and
/// weights uniform in `[0, hi]`.
pub fn random_graph(n: usize, max_arcs: usize, hi: f64, seed: u64) -> DirectedWeightedGraph {
    let mut rng = rng::seeded(seed);
    let mut pairs: Vec<(u32, u32)> = (0..n as u32)
        .flat_map(|u| (0..n as u32).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    let mut arcs = Vec::new();
    while arcs.len() < max_arcs && !pairs.is_empty() {
        let (u, v) = pairs.swap_remove(rng.random_range(0..pairs.len()));
        if rng.random::<f64>() < 0.6 {
            arcs.push(Arc { source: u, target: v, weight: hi * rng.random::<f64>() });
        }
    }
    DirectedWeightedGraph::new(n, arcs).unwrap()
}

pub fn random_subset(n: usize, rng: &mut impl Rng) -> Vec<u32> {
    (0..n as u32).filter(|_| rng.random::<bool>()).collect()
}

/// All subsets of `0..n` of size `k`.
pub fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<u32>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n as u32).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}
