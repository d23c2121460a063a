//! Weighted greedy influence maximization over a fixed live-edge sample, and
//! the two maximin heuristics used as baselines.
//!
//! The objective is `σ̃^ω(S) = Σ_v ω_v σ̃_v(S)`. Coverage is tracked per
//! (sample, component), so adding a seed touches only the components it
//! newly reaches.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::community::CommunityStructure;
use crate::diffusion::LiveEdgeSample;
use crate::error::{Error, Result};
use crate::NodeId;

/// Non-negative per-node weights `ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeWeights(Vec<f64>);

impl NodeWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some((v, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(**w >= 0.0 && w.is_finite()))
        {
            return Err(Error::Parameter(format!("node weight {w} at {v} is not a finite non-negative number")));
        }
        Ok(Self(weights))
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `ω_v = Σ_{C ∋ v} z_C / |C|`; nodes outside every community get 0.
pub fn weights_from_community_duals(z: &[f64], communities: &CommunityStructure) -> Result<NodeWeights> {
    if z.len() != communities.len() {
        return Err(Error::Parameter(format!(
            "{} duals for {} communities",
            z.len(),
            communities.len()
        )));
    }
    let mut w = vec![0.0; communities.n()];
    for (c, &zc) in communities.iter().zip(z) {
        let share = zc / c.len() as f64;
        for &v in c {
            w[v as usize] += share;
        }
    }
    NodeWeights::new(w)
}

/// Nested greedy solutions `S_1 ⊆ … ⊆ S_k` with their objective values.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GreedyTrace {
    order: Vec<NodeId>,
    values: Vec<f64>,
}

impl GreedyTrace {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Seeds in selection order.
    pub fn order(&self) -> &[NodeId] {
        &self.order
    }

    /// `S_i`, the first `i` selections.
    pub fn prefix(&self, i: usize) -> &[NodeId] {
        &self.order[..i]
    }

    /// `σ̃^ω(S_i)` for `i >= 1`.
    pub fn value(&self, i: usize) -> f64 {
        self.values[i - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn gains(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.values
            .iter()
            .map(|&v| {
                let g = v - prev;
                prev = v;
                g
            })
            .collect()
    }
}

fn check_budget(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("budget k = {k} must lie in 1..={n}")));
    }
    Ok(())
}

#[derive(Debug)]
struct Candidate {
    gain: f64,
    node: NodeId,
    round: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // Larger gain first, then the smaller node id.
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Per-(sample, component) coverage state of a growing seed set.
pub(crate) struct Coverage<'a> {
    sample: &'a LiveEdgeSample,
    covered: Vec<Vec<bool>>,
}

impl<'a> Coverage<'a> {
    pub(crate) fn new(sample: &'a LiveEdgeSample) -> Self {
        let covered = sample
            .graphs()
            .iter()
            .map(|g| vec![false; g.component_count()])
            .collect();
        Self { sample, covered }
    }

    pub(crate) fn add(&mut self, seed: NodeId) {
        for (g, covered) in self.sample.graphs().iter().zip(self.covered.iter_mut()) {
            g.cover(&[seed], covered);
        }
    }

    /// Number of samples in which each node is covered.
    pub(crate) fn counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.sample.n()];
        for (g, covered) in self.sample.graphs().iter().zip(&self.covered) {
            for (v, c) in counts.iter_mut().enumerate() {
                *c += covered[g.component_of(v as NodeId) as usize] as u32;
            }
        }
        counts
    }

    pub(crate) fn sigma(&self) -> Vec<f64> {
        let t = self.sample.len() as f64;
        self.counts().into_iter().map(|c| c as f64 / t).collect()
    }
}

/// Greedy on `σ̃^ω` with lazy re-evaluation of stale gains; ties go to the
/// lowest node id. Returns the nested trace `S_1 ⊆ … ⊆ S_k`.
pub fn greedy_weighted_im(sample: &LiveEdgeSample, weights: &NodeWeights, k: usize) -> Result<GreedyTrace> {
    greedy_with_coverage(sample, weights, k, None).map(|(trace, _)| trace)
}

/// For every node `v`, the nodes it reaches in some sample together with the
/// number of samples in which it does. With it, the first-round gain of `v`
/// under any weights is one sparse dot product instead of a pass over all
/// samples.
pub(crate) struct ReachCounts {
    offsets: Vec<usize>,
    entries: Vec<(NodeId, u32)>,
}

impl ReachCounts {
    /// `None` if the table would hold more entries than one pass over the
    /// per-sample reach lists touches, in which case it would not pay off.
    pub(crate) fn build(sample: &LiveEdgeSample) -> Option<Self> {
        let n = sample.n();
        let limit = sample.index_size() + sample.len() * n;
        let mut count = vec![0u32; n];
        let mut touched: Vec<NodeId> = Vec::new();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut entries = Vec::new();
        for v in 0..n as NodeId {
            for g in sample.graphs() {
                for &d in g.reach(g.component_of(v)) {
                    for &u in g.members(d) {
                        if count[u as usize] == 0 {
                            touched.push(u);
                        }
                        count[u as usize] += 1;
                    }
                }
            }
            touched.sort_unstable();
            for &u in &touched {
                entries.push((u, count[u as usize]));
                count[u as usize] = 0;
            }
            touched.clear();
            if entries.len() > limit {
                return None;
            }
            offsets.push(entries.len());
        }
        Some(Self { offsets, entries })
    }

    fn gain(&self, v: NodeId, w: &[f64]) -> f64 {
        self.entries[self.offsets[v as usize]..self.offsets[v as usize + 1]]
            .iter()
            .map(|&(u, c)| w[u as usize] * c as f64)
            .sum()
    }
}

/// As [`greedy_weighted_im`], also returning `σ̃_v(S_k)` for every node.
pub(crate) fn greedy_with_coverage(
    sample: &LiveEdgeSample,
    weights: &NodeWeights,
    k: usize,
    counts: Option<&ReachCounts>,
) -> Result<(GreedyTrace, Vec<f64>)> {
    let n = sample.n();
    check_budget(k, n)?;
    if weights.len() != n {
        return Err(Error::Parameter(format!("{} weights for {n} nodes", weights.len())));
    }
    let w = weights.as_slice();
    let comp_weight: Vec<Vec<f64>> = sample.per_graph(|g| {
        (0..g.component_count() as u32)
            .map(|c| g.members(c).iter().map(|&v| w[v as usize]).sum())
            .collect()
    });
    let initial: Vec<f64> = match counts {
        Some(counts) => (0..n as NodeId).map(|v| counts.gain(v, w)).collect(),
        None => {
            // Full (nothing covered) gain of every component, per sample.
            let full: Vec<Vec<f64>> = sample.per_graph_indexed(|t, g| {
                (0..g.component_count() as u32)
                    .map(|c| g.reach(c).iter().map(|&d| comp_weight[t][d as usize]).sum())
                    .collect()
            });
            (0..n as NodeId)
                .map(|v| {
                    sample
                        .graphs()
                        .iter()
                        .zip(&full)
                        .map(|(g, f)| f[g.component_of(v) as usize])
                        .sum()
                })
                .collect()
        }
    };
    let t = sample.len() as f64;
    let mut heap: BinaryHeap<Candidate> = initial
        .into_iter()
        .enumerate()
        .map(|(v, gain)| Candidate {
            gain,
            node: v as NodeId,
            round: 0,
        })
        .collect();

    let mut coverage = Coverage::new(sample);
    let mut order = Vec::with_capacity(k);
    let mut values = Vec::with_capacity(k);
    let mut total = 0.0;
    while order.len() < k {
        let round = order.len();
        let mut top = heap.pop().expect("candidates remain while |S| < n");
        if top.round != round {
            top.gain = marginal_gain(&coverage, &comp_weight, top.node);
            top.round = round;
            heap.push(top);
            continue;
        }
        coverage.add(top.node);
        total += top.gain;
        order.push(top.node);
        values.push(total / t);
    }
    let sigma = coverage.sigma();
    Ok((GreedyTrace { order, values }, sigma))
}

fn marginal_gain(coverage: &Coverage<'_>, comp_weights: &[Vec<f64>], v: NodeId) -> f64 {
    let mut gain = 0.0;
    for ((g, covered), comp_weight) in coverage
        .sample
        .graphs()
        .iter()
        .zip(&coverage.covered)
        .zip(comp_weights)
    {
        let c = g.component_of(v);
        if covered[c as usize] {
            continue;
        }
        let mut part = 0.0;
        for &d in g.reach(c) {
            if !covered[d as usize] {
                part += comp_weight[d as usize];
            }
        }
        gain += part;
    }
    gain
}

/// Fish et al.'s greedy maximin: repeatedly add the node maximizing
/// `min_C σ̃_C(S ∪ {v})`, breaking ties by larger out-degree, then lower id.
pub fn greedy_maximin(sample: &LiveEdgeSample, communities: &CommunityStructure, k: usize) -> Result<Vec<NodeId>> {
    let n = sample.n();
    check_budget(k, n)?;
    if communities.n() != n {
        return Err(Error::Parameter(format!(
            "communities over {} nodes, sample over {n}",
            communities.n()
        )));
    }
    let degree = sample.out_degree();
    let mut coverage = Coverage::new(sample);
    let mut chosen = vec![false; n];
    let mut seeds = Vec::with_capacity(k);
    let mut extra = vec![0u32; n];
    for _ in 0..k {
        let counts = coverage.counts();
        let mut best: Option<(f64, u32, NodeId)> = None;
        for v in 0..n as NodeId {
            if chosen[v as usize] {
                continue;
            }
            extra.iter_mut().for_each(|e| *e = 0);
            for (g, covered) in sample.graphs().iter().zip(&coverage.covered) {
                let c = g.component_of(v);
                if covered[c as usize] {
                    continue;
                }
                for &d in g.reach(c) {
                    if !covered[d as usize] {
                        for &u in g.members(d) {
                            extra[u as usize] += 1;
                        }
                    }
                }
            }
            let value = communities
                .iter()
                .map(|c| {
                    let hits: u64 = c
                        .iter()
                        .map(|&u| (counts[u as usize] + extra[u as usize]) as u64)
                        .sum();
                    hits as f64 / c.len() as f64
                })
                .fold(f64::INFINITY, f64::min);
            let better = match best {
                None => true,
                Some((bv, bd, _)) => value > bv || (value == bv && degree[v as usize] > bd),
            };
            if better {
                best = Some((value, degree[v as usize], v));
            }
        }
        let (_, _, v) = best.expect("a free node exists while |S| < n");
        chosen[v as usize] = true;
        coverage.add(v);
        seeds.push(v);
    }
    Ok(seeds)
}

/// Fish et al.'s myopic rule: start from the node of largest out-degree,
/// then `k - 1` times add the node least likely to be reached.
pub fn myopic_fish(sample: &LiveEdgeSample, k: usize) -> Result<Vec<NodeId>> {
    let n = sample.n();
    check_budget(k, n)?;
    let degree = sample.out_degree();
    let first = (0..n as NodeId)
        .max_by(|&a, &b| degree[a as usize].cmp(&degree[b as usize]).then(b.cmp(&a)))
        .expect("n >= 1");
    let mut coverage = Coverage::new(sample);
    let mut chosen = vec![false; n];
    let mut seeds = vec![first];
    chosen[first as usize] = true;
    coverage.add(first);
    while seeds.len() < k {
        let counts = coverage.counts();
        let v = (0..n as NodeId)
            .filter(|&v| !chosen[v as usize])
            .min_by(|&a, &b| counts[a as usize].cmp(&counts[b as usize]).then(a.cmp(&b)))
            .expect("a free node exists while |S| < n");
        chosen[v as usize] = true;
        coverage.add(v);
        seeds.push(v);
    }
    Ok(seeds)
}
