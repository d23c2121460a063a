//! Live-edge sampling under the triggering model and reachability-based
//! estimators.
//!
//! A [`LiveEdgeSample`] holds `T` sampled live-edge graphs. Each one is
//! condensed into strongly connected components: every member of a component
//! is reached by exactly the same sources, so coverage is tracked per
//! component and "who reaches `v`" is the union of the members of the
//! components in `reached_by(comp(v))`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::DirectedWeightedGraph;
use crate::rng;
use crate::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum DiffusionModel {
    /// Every arc `(u, v)` is live independently with probability `w_uv`.
    IndependentCascade,
    /// Every node keeps at most one incoming arc, `(u, v)` with probability
    /// `w_uv`. Requires incoming weights to sum to at most one.
    LinearThreshold,
}

/// Accuracy target for the sample count, or an explicit count.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimatorParams {
    pub epsilon: f64,
    pub delta: f64,
    /// Scales the bound; 4 gives the count needed when the additive error is
    /// split between estimation and optimization.
    pub multiplier: f64,
    pub samples: Option<usize>,
}

impl EstimatorParams {
    pub fn new(epsilon: f64, delta: f64) -> Self {
        Self {
            epsilon,
            delta,
            multiplier: 1.0,
            samples: None,
        }
    }

    pub fn fixed(samples: usize) -> Self {
        Self {
            epsilon: 0.1,
            delta: 0.1,
            multiplier: 1.0,
            samples: Some(samples),
        }
    }
}

/// Number of live-edge graphs needed so that every `σ̃_v(S)` is within
/// `epsilon` of `σ_v(S)` for all `v` and `S` with probability `1 - delta`:
/// `ceil(multiplier * epsilon^-2 * (n + ln n + ln(1/delta)))`.
pub fn required_samples(params: &EstimatorParams, n: usize) -> Result<usize> {
    if let Some(t) = params.samples {
        if t == 0 {
            return Err(Error::Parameter("sample count must be positive".into()));
        }
        return Ok(t);
    }
    let EstimatorParams {
        epsilon,
        delta,
        multiplier,
        ..
    } = *params;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Parameter(format!("epsilon = {epsilon} must lie in (0, 1)")));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::Parameter(format!("delta = {delta} must lie in (0, 1/2)")));
    }
    if !(multiplier > 0.0 && multiplier.is_finite()) {
        return Err(Error::Parameter(format!("multiplier = {multiplier} must be positive")));
    }
    if n == 0 {
        return Err(Error::Parameter("graph has no nodes".into()));
    }
    let n = n as f64;
    let bound = multiplier * (n + libm::log(n) + libm::log(1.0 / delta)) / (epsilon * epsilon);
    Ok(libm::ceil(bound) as usize)
}

/// Compressed row storage: row `i` is `items[offsets[i]..offsets[i + 1]]`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct Rows {
    offsets: Vec<u32>,
    items: Vec<u32>,
}

impl Rows {
    fn from_lists(lists: impl IntoIterator<Item = impl IntoIterator<Item = u32>>) -> Self {
        let mut offsets = vec![0u32];
        let mut items = Vec::new();
        for list in lists {
            items.extend(list);
            offsets.push(items.len() as u32);
        }
        Self { offsets, items }
    }

    #[inline]
    pub(crate) fn row(&self, i: u32) -> &[u32] {
        &self.items[self.offsets[i as usize] as usize..self.offsets[i as usize + 1] as usize]
    }

    pub(crate) fn total(&self) -> usize {
        self.items.len()
    }
}

/// One live-edge graph, condensed.
#[derive(Debug, Clone, PartialEq)]
pub struct LiveGraph {
    live_arcs: Vec<(NodeId, NodeId)>,
    component: Vec<u32>,
    members: Rows,
    reach: Rows,
    reached_by: Rows,
}

impl LiveGraph {
    fn build(n: usize, live_arcs: Vec<(NodeId, NodeId)>) -> Self {
        let adjacency = {
            let mut lists = vec![Vec::new(); n];
            for &(u, v) in &live_arcs {
                lists[u as usize].push(v);
            }
            Rows::from_lists(lists)
        };
        let (component, count) = strongly_connected(n, &adjacency);
        let mut member_lists = vec![Vec::new(); count];
        for (v, &c) in component.iter().enumerate() {
            member_lists[c as usize].push(v as u32);
        }
        let mut dag = vec![Vec::new(); count];
        for &(u, v) in &live_arcs {
            let (cu, cv) = (component[u as usize], component[v as usize]);
            if cu != cv {
                dag[cu as usize].push(cv);
            }
        }
        let mut stamp = vec![u32::MAX; count];
        let mut reach_lists = Vec::with_capacity(count);
        let mut stack = Vec::new();
        for c in 0..count as u32 {
            let mut out = Vec::new();
            stamp[c as usize] = c;
            stack.push(c);
            while let Some(d) = stack.pop() {
                out.push(d);
                for &e in &dag[d as usize] {
                    if stamp[e as usize] != c {
                        stamp[e as usize] = c;
                        stack.push(e);
                    }
                }
            }
            out.sort_unstable();
            reach_lists.push(out);
        }
        let mut by_lists = vec![Vec::new(); count];
        for (c, list) in reach_lists.iter().enumerate() {
            for &d in list {
                by_lists[d as usize].push(c as u32);
            }
        }
        Self {
            live_arcs,
            component,
            members: Rows::from_lists(member_lists),
            reach: Rows::from_lists(reach_lists),
            reached_by: Rows::from_lists(by_lists),
        }
    }

    pub fn live_arcs(&self) -> &[(NodeId, NodeId)] {
        &self.live_arcs
    }

    pub fn component_count(&self) -> usize {
        self.members.offsets.len() - 1
    }

    #[inline]
    pub(crate) fn component_of(&self, v: NodeId) -> u32 {
        self.component[v as usize]
    }

    #[inline]
    pub(crate) fn members(&self, c: u32) -> &[NodeId] {
        self.members.row(c)
    }

    /// Components reachable from `c`, including `c`.
    #[inline]
    pub(crate) fn reach(&self, c: u32) -> &[u32] {
        self.reach.row(c)
    }

    /// Components that reach `c`, including `c`.
    #[inline]
    pub(crate) fn reached_by(&self, c: u32) -> &[u32] {
        self.reached_by.row(c)
    }

    /// Sorted `{i : v ∈ ρ_L(i)}`; always contains `v`.
    pub fn sources_reaching(&self, v: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .reached_by(self.component_of(v))
            .iter()
            .flat_map(|&d| self.members(d).iter().copied())
            .collect();
        out.sort_unstable();
        out
    }

    pub fn reaches(&self, source: NodeId, v: NodeId) -> bool {
        self.reach(self.component_of(source))
            .binary_search(&self.component_of(v))
            .is_ok()
    }

    /// Marks every component reached from `seeds`.
    pub(crate) fn cover(&self, seeds: &[NodeId], covered: &mut [bool]) {
        for &s in seeds {
            let c = self.component_of(s);
            if covered[c as usize] {
                continue;
            }
            for &d in self.reach(c) {
                covered[d as usize] = true;
            }
        }
    }

    /// `q_v(L, x) = Pr_{S~x}[v ∈ ρ_L(S)] = 1 - Π (1 - x_i)` over sources `i`
    /// of `v`, accumulated as `q ← q + (1 - q)·x_i` so that `q <= p_v` holds
    /// in floating point as well.
    pub fn reach_probability(&self, v: NodeId, x: &[f64]) -> f64 {
        self.component_reach_probability(self.component_of(v), x)
    }

    fn component_reach_probability(&self, c: u32, x: &[f64]) -> f64 {
        let mut q = 0.0;
        for &d in self.reached_by(c) {
            for &i in self.members(d) {
                q += (1.0 - q) * x[i as usize];
            }
        }
        q
    }

    /// `p_v(L, x) = min(1, Σ x_i)` over sources `i` of `v`.
    pub fn truncated_mass(&self, v: NodeId, x: &[f64]) -> f64 {
        self.component_truncated_mass(self.component_of(v), x)
    }

    fn component_truncated_mass(&self, c: u32, x: &[f64]) -> f64 {
        let mut p = 0.0;
        for &d in self.reached_by(c) {
            for &i in self.members(d) {
                p += x[i as usize];
            }
        }
        p.min(1.0)
    }
}

// Iterative Tarjan. Components are numbered in completion order, so every
// arc between components points from a higher id to a lower one.
fn strongly_connected(n: usize, adjacency: &Rows) -> (Vec<u32>, usize) {
    const UNSEEN: u32 = u32::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut component = vec![UNSEEN; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut call: Vec<(u32, usize)> = Vec::new();
    let mut next_index = 0u32;
    let mut count = 0u32;
    for root in 0..n as u32 {
        if index[root as usize] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root as usize] = next_index;
        low[root as usize] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root as usize] = true;
        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            let succ = adjacency.row(v);
            if *edge < succ.len() {
                let w = succ[*edge];
                *edge += 1;
                if index[w as usize] == UNSEEN {
                    index[w as usize] = next_index;
                    low[w as usize] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w as usize] = true;
                    call.push((w, 0));
                } else if on_stack[w as usize] {
                    low[v as usize] = low[v as usize].min(index[w as usize]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent as usize] = low[parent as usize].min(low[v as usize]);
            }
            if low[v as usize] == index[v as usize] {
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w as usize] = false;
                    component[w as usize] = count;
                    if w == v {
                        break;
                    }
                }
                count += 1;
            }
        }
    }
    (component, count as usize)
}

/// `T` live-edge graphs with their reachability indexes. Immutable and
/// shareable across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct LiveEdgeSample {
    n: usize,
    seed: u64,
    out_degree: Vec<u32>,
    graphs: Vec<LiveGraph>,
}

/// Samples `t` live-edge graphs. Sample `i` draws from its own stream
/// `(seed, i)`, so the result does not depend on the thread count.
pub fn sample_live_edges(
    graph: &DirectedWeightedGraph,
    model: DiffusionModel,
    t: usize,
    seed: u64,
) -> Result<LiveEdgeSample> {
    if t == 0 {
        return Err(Error::Parameter("sample count must be positive".into()));
    }
    if model == DiffusionModel::LinearThreshold {
        for v in 0..graph.n() as NodeId {
            let sum: f64 = graph.in_arcs(v).map(|a| a.weight).sum();
            if sum > 1.0 + 1e-9 {
                return Err(Error::Model { node: v, sum });
            }
        }
    }
    let n = graph.n();
    let draw = |i: usize| {
        let mut rng = rng::stream(seed, i as u64);
        let mut live = Vec::new();
        match model {
            DiffusionModel::IndependentCascade => {
                for a in graph.arcs() {
                    if rng.random::<f64>() < a.weight {
                        live.push((a.source, a.target));
                    }
                }
            }
            DiffusionModel::LinearThreshold => {
                for v in 0..n as NodeId {
                    let r = rng.random::<f64>();
                    let mut acc = 0.0;
                    for a in graph.in_arcs(v) {
                        acc += a.weight;
                        if r < acc {
                            live.push((a.source, v));
                            break;
                        }
                    }
                }
            }
        }
        LiveGraph::build(n, live)
    };
    let graphs = map_indexed(t, draw);
    Ok(LiveEdgeSample {
        n,
        seed,
        out_degree: graph.out_degrees(),
        graphs,
    })
}

#[cfg(feature = "std")]
pub(crate) fn map_indexed<R: Send>(len: usize, f: impl Fn(usize) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "std"))]
pub(crate) fn map_indexed<R>(len: usize, f: impl Fn(usize) -> R) -> Vec<R> {
    (0..len).map(f).collect()
}

impl LiveEdgeSample {
    /// Rebuilds a sample from its live arc lists, e.g. after deserializing a
    /// fixture.
    pub fn from_live_arcs(
        n: usize,
        seed: u64,
        out_degree: Vec<u32>,
        samples: Vec<Vec<(NodeId, NodeId)>>,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Parameter("sample count must be positive".into()));
        }
        if out_degree.len() != n {
            return Err(Error::Parameter(format!(
                "{} out-degrees given for {n} nodes",
                out_degree.len()
            )));
        }
        for (t, arcs) in samples.iter().enumerate() {
            if let Some(&(u, v)) = arcs.iter().find(|&&(u, v)| u as usize >= n || v as usize >= n) {
                return Err(Error::Parameter(format!(
                    "sample {t} has arc ({u}, {v}) outside 0..{n}"
                )));
            }
        }
        let graphs = samples.into_iter().map(|arcs| LiveGraph::build(n, arcs)).collect();
        Ok(Self {
            n,
            seed,
            out_degree,
            graphs,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of sampled live-edge graphs `T`.
    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn out_degree(&self) -> &[u32] {
        &self.out_degree
    }

    pub fn graphs(&self) -> &[LiveGraph] {
        &self.graphs
    }

    pub fn graph(&self, t: usize) -> &LiveGraph {
        &self.graphs[t]
    }

    pub fn sources_reaching(&self, t: usize, v: NodeId) -> Vec<NodeId> {
        self.graphs[t].sources_reaching(v)
    }

    /// Total size of the reachability index, in component pairs.
    pub fn index_size(&self) -> usize {
        self.graphs.iter().map(|g| g.reach.total()).sum()
    }

    pub(crate) fn per_graph<R: Send>(&self, f: impl Fn(&LiveGraph) -> R + Sync + Send) -> Vec<R> {
        map_indexed(self.graphs.len(), |t| f(&self.graphs[t]))
    }

    pub(crate) fn per_graph_indexed<R: Send>(&self, f: impl Fn(usize, &LiveGraph) -> R + Sync + Send) -> Vec<R> {
        map_indexed(self.graphs.len(), |t| f(t, &self.graphs[t]))
    }

    // Sums per-graph node vectors in sample order and divides by T.
    fn average(&self, parts: Vec<Vec<f64>>) -> Vec<f64> {
        let mut acc = vec![0.0; self.n];
        for part in parts {
            for (a, p) in acc.iter_mut().zip(part) {
                *a += p;
            }
        }
        let t = self.graphs.len() as f64;
        acc.iter_mut().for_each(|a| *a /= t);
        acc
    }

    /// `σ̃_v(S)` for every node: the fraction of samples in which `v` is
    /// reachable from `seeds`.
    pub fn sigma_set(&self, seeds: &[NodeId]) -> Vec<f64> {
        let parts = self.per_graph(|g| {
            let mut covered = vec![false; g.component_count()];
            g.cover(seeds, &mut covered);
            (0..self.n as NodeId)
                .map(|v| if covered[g.component_of(v) as usize] { 1.0 } else { 0.0 })
                .collect()
        });
        self.average(parts)
    }

    /// `σ̃_v(x)`: exact expectation over `S ~ x` (independent seeding)
    /// conditional on the sampled graphs.
    pub fn sigma_node_strategy(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "strategy length must equal n");
        let parts = self.per_graph(|g| {
            let per_component: Vec<f64> = (0..g.component_count() as u32)
                .map(|c| g.component_reach_probability(c, x))
                .collect();
            (0..self.n as NodeId)
                .map(|v| per_component[g.component_of(v) as usize])
                .collect()
        });
        self.average(parts)
    }

    /// `σ̃_v(p) = Σ_S p_S σ̃_v(S)` over a finite support.
    pub fn sigma_distribution<'a>(
        &self,
        support: impl IntoIterator<Item = (&'a [NodeId], f64)>,
    ) -> Vec<f64> {
        let mut acc = vec![0.0; self.n];
        for (set, p) in support {
            for (a, s) in acc.iter_mut().zip(self.sigma_set(set)) {
                *a += p * s;
            }
        }
        acc
    }

    /// `λ_v(x) = (1/T) Σ_t min(1, Σ_{i reaches v in L_t} x_i)`.
    pub fn truncated_mass(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "strategy length must equal n");
        let parts = self.per_graph(|g| {
            let per_component: Vec<f64> = (0..g.component_count() as u32)
                .map(|c| g.component_truncated_mass(c, x))
                .collect();
            (0..self.n as NodeId)
                .map(|v| per_component[g.component_of(v) as usize])
                .collect()
        });
        self.average(parts)
    }
}
