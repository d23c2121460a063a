//! Exhaustive evaluation on tiny instances: every live-edge outcome is
//! enumerated with its probability, and strategies are evaluated by
//! enumerating seed outcomes. Used as a reference for the estimators and
//! solvers.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::diffusion::DiffusionModel;
use crate::error::{Error, Result};
use crate::graph::DirectedWeightedGraph;
use crate::NodeId;

pub const MAX_ARCS: usize = 25;
pub const MAX_STRATEGY_NODES: usize = 12;

/// Distribution over live-edge outcomes, grouped by their reachability
/// relation. `reach[i]` is the bitmask of nodes reachable from `i`.
#[derive(Debug, Clone)]
pub struct ExactEvaluator {
    n: usize,
    outcomes: Vec<(Vec<u64>, f64)>,
}

impl ExactEvaluator {
    pub fn new(graph: &DirectedWeightedGraph, model: DiffusionModel) -> Result<Self> {
        let n = graph.n();
        if n > 63 {
            return Err(Error::Size(format!("{n} nodes; at most 63 supported")));
        }
        let mut grouped: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
        match model {
            DiffusionModel::IndependentCascade => {
                let arcs = graph.arcs();
                if arcs.len() > MAX_ARCS {
                    return Err(Error::Size(format!(
                        "{} arcs; at most {MAX_ARCS} can be enumerated",
                        arcs.len()
                    )));
                }
                for mask in 0u64..(1u64 << arcs.len()) {
                    let mut prob = 1.0;
                    let mut adj = vec![0u64; n];
                    for (i, a) in arcs.iter().enumerate() {
                        if mask >> i & 1 == 1 {
                            prob *= a.weight;
                            adj[a.source as usize] |= 1 << a.target;
                        } else {
                            prob *= 1.0 - a.weight;
                        }
                    }
                    if prob > 0.0 {
                        *grouped.entry(closure(adj)).or_insert(0.0) += prob;
                    }
                }
            }
            DiffusionModel::LinearThreshold => {
                // Per node: list of (chosen in-neighbour or none, probability).
                let mut choices: Vec<Vec<(Option<NodeId>, f64)>> = Vec::with_capacity(n);
                let mut outcomes = 1.0f64;
                for v in 0..n as NodeId {
                    let mut opts: Vec<(Option<NodeId>, f64)> =
                        graph.in_arcs(v).map(|a| (Some(a.source), a.weight)).collect();
                    let total: f64 = opts.iter().map(|o| o.1).sum();
                    if total > 1.0 + 1e-9 {
                        return Err(Error::Model { node: v, sum: total });
                    }
                    opts.push((None, (1.0 - total).max(0.0)));
                    outcomes *= opts.len() as f64;
                    choices.push(opts);
                }
                if outcomes > (1u64 << MAX_ARCS) as f64 {
                    return Err(Error::Size(format!("{outcomes} live-edge outcomes")));
                }
                let mut pick = vec![0usize; n];
                loop {
                    let mut prob = 1.0;
                    let mut adj = vec![0u64; n];
                    for v in 0..n {
                        let (src, p) = choices[v][pick[v]];
                        prob *= p;
                        if let Some(u) = src {
                            adj[u as usize] |= 1 << v;
                        }
                    }
                    if prob > 0.0 {
                        *grouped.entry(closure(adj)).or_insert(0.0) += prob;
                    }
                    let mut i = 0;
                    while i < n {
                        pick[i] += 1;
                        if pick[i] < choices[i].len() {
                            break;
                        }
                        pick[i] = 0;
                        i += 1;
                    }
                    if i == n {
                        break;
                    }
                }
            }
        }
        Ok(Self {
            n,
            outcomes: grouped.into_iter().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of distinct reachability relations with positive probability.
    pub fn outcome_count(&self) -> usize {
        self.outcomes.len()
    }

    fn seed_mask(&self, seeds: &[NodeId]) -> u64 {
        seeds.iter().fold(0, |m, &s| m | 1 << s)
    }

    fn reached_mask(reach: &[u64], seeds: u64) -> u64 {
        let mut m = 0;
        let mut rest = seeds;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            m |= reach[i];
            rest &= rest - 1;
        }
        m
    }

    /// Exact `σ_v(S)` for every node.
    pub fn sigma_set(&self, seeds: &[NodeId]) -> Vec<f64> {
        self.sigma_mask(self.seed_mask(seeds))
    }

    fn sigma_mask(&self, seeds: u64) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (reach, prob) in &self.outcomes {
            let m = Self::reached_mask(reach, seeds);
            for (v, o) in out.iter_mut().enumerate() {
                if m >> v & 1 == 1 {
                    *o += prob;
                }
            }
        }
        out
    }

    /// `σ_v(S)` for every subset `S`, indexed by bitmask.
    pub fn sigma_all_subsets(&self) -> Result<Vec<Vec<f64>>> {
        if self.n > MAX_STRATEGY_NODES {
            return Err(Error::Size(format!(
                "{} nodes; subsets enumerable for at most {MAX_STRATEGY_NODES}",
                self.n
            )));
        }
        Ok((0u64..1 << self.n).map(|s| self.sigma_mask(s)).collect())
    }

    /// Exact `σ_v(x)` by enumerating all `2^n` seed outcomes of independent
    /// seeding with marginals `x`.
    pub fn sigma_node_strategy(&self, x: &[f64]) -> Result<Vec<f64>> {
        let table = self.sigma_all_subsets()?;
        Ok(self.sigma_node_strategy_with(&table, x))
    }

    pub(crate) fn sigma_node_strategy_with(&self, table: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (s, sigma) in table.iter().enumerate() {
            let mut prob = 1.0;
            for (i, &xi) in x.iter().enumerate() {
                prob *= if s >> i & 1 == 1 { xi } else { 1.0 - xi };
            }
            if prob == 0.0 {
                continue;
            }
            for (o, &v) in out.iter_mut().zip(sigma) {
                *o += prob * v;
            }
        }
        out
    }

    /// Exact `σ_v(p)` for a finite distribution over seed sets.
    pub fn sigma_distribution<'a>(
        &self,
        support: impl IntoIterator<Item = (&'a [NodeId], f64)>,
    ) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (set, p) in support {
            for (o, v) in out.iter_mut().zip(self.sigma_set(set)) {
                *o += p * v;
            }
        }
        out
    }
}

// Transitive closure over bitmasks (Warshall); every node reaches itself.
fn closure(mut reach: Vec<u64>) -> Vec<u64> {
    let n = reach.len();
    for (i, r) in reach.iter_mut().enumerate() {
        *r |= 1 << i;
    }
    for k in 0..n {
        let rk = reach[k];
        for r in reach.iter_mut() {
            if *r >> k & 1 == 1 {
                *r |= rk;
            }
        }
    }
    reach
}
