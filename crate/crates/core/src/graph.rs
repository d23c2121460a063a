//! Directed arc-weighted graphs and the random graph generators used for
//! synthetic instances.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::{self, Rng};
use crate::NodeId;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Arc {
    pub source: NodeId,
    pub target: NodeId,
    pub weight: f64,
}

/// Directed graph `G = (V, A, w)` with arc weights in `[0, 1]`.
///
/// Arcs are stored in insertion order; per-node out- and in-arc indexes
/// point into that list. The structure is immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedWeightedGraph {
    n: usize,
    arcs: Vec<Arc>,
    out_offsets: Vec<usize>,
    out_index: Vec<u32>,
    in_offsets: Vec<usize>,
    in_index: Vec<u32>,
}

impl DirectedWeightedGraph {
    /// Builds a graph on nodes `0..n`. Rejects weights outside `[0, 1]`,
    /// node ids `>= n` and repeated `(source, target)` pairs.
    pub fn new(n: usize, arcs: Vec<Arc>) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(Error::Graph(format!("{n} nodes exceed the u32 id range")));
        }
        let mut seen = BTreeSet::new();
        for (i, a) in arcs.iter().enumerate() {
            if a.source as usize >= n || a.target as usize >= n {
                return Err(Error::Graph(format!(
                    "arc {i} ({}, {}) references a node outside 0..{n}",
                    a.source, a.target
                )));
            }
            if !(0.0..=1.0).contains(&a.weight) {
                return Err(Error::Graph(format!(
                    "arc {i} ({}, {}) has weight {} outside [0, 1]",
                    a.source, a.target, a.weight
                )));
            }
            if !seen.insert((a.source, a.target)) {
                return Err(Error::Graph(format!(
                    "duplicate arc ({}, {})",
                    a.source, a.target
                )));
            }
        }
        let (out_offsets, out_index) = bucket(n, &arcs, |a| a.source);
        let (in_offsets, in_index) = bucket(n, &arcs, |a| a.target);
        Ok(Self {
            n,
            arcs,
            out_offsets,
            out_index,
            in_offsets,
            in_index,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn out_arcs(&self, v: NodeId) -> impl Iterator<Item = &Arc> + '_ {
        let v = v as usize;
        self.out_index[self.out_offsets[v]..self.out_offsets[v + 1]]
            .iter()
            .map(move |&i| &self.arcs[i as usize])
    }

    pub fn in_arcs(&self, v: NodeId) -> impl Iterator<Item = &Arc> + '_ {
        let v = v as usize;
        self.in_index[self.in_offsets[v]..self.in_offsets[v + 1]]
            .iter()
            .map(move |&i| &self.arcs[i as usize])
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_offsets[v as usize + 1] - self.out_offsets[v as usize]
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_offsets[v as usize + 1] - self.in_offsets[v as usize]
    }

    pub fn out_degrees(&self) -> Vec<u32> {
        (0..self.n as NodeId).map(|v| self.out_degree(v) as u32).collect()
    }

    /// Nodes of the largest weakly connected component, ascending. Ties go
    /// to the component containing the smallest node id.
    pub fn largest_weak_component(&self) -> Vec<NodeId> {
        let mut label = vec![u32::MAX; self.n];
        let mut best: Vec<NodeId> = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if label[start] != u32::MAX {
                continue;
            }
            let mut members = Vec::new();
            label[start] = start as u32;
            queue.push_back(start as NodeId);
            while let Some(u) = queue.pop_front() {
                members.push(u);
                let nbrs = self
                    .out_arcs(u)
                    .map(|a| a.target)
                    .chain(self.in_arcs(u).map(|a| a.source));
                for w in nbrs {
                    if label[w as usize] == u32::MAX {
                        label[w as usize] = start as u32;
                        queue.push_back(w);
                    }
                }
            }
            if members.len() > best.len() {
                best = members;
            }
        }
        best.sort_unstable();
        best
    }

    /// Subgraph induced by `keep` (ascending, distinct), relabelled densely in
    /// that order.
    pub fn induced(&self, keep: &[NodeId]) -> Result<Self> {
        let mut map = vec![u32::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            map[old as usize] = new as u32;
        }
        let arcs = self
            .arcs
            .iter()
            .filter(|a| map[a.source as usize] != u32::MAX && map[a.target as usize] != u32::MAX)
            .map(|a| Arc {
                source: map[a.source as usize],
                target: map[a.target as usize],
                weight: a.weight,
            })
            .collect();
        Self::new(keep.len(), arcs)
    }
}

fn bucket(n: usize, arcs: &[Arc], key: impl Fn(&Arc) -> NodeId) -> (Vec<usize>, Vec<u32>) {
    let mut offsets = vec![0usize; n + 1];
    for a in arcs {
        offsets[key(a) as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut index = vec![0u32; arcs.len()];
    for (i, a) in arcs.iter().enumerate() {
        let slot = &mut fill[key(a) as usize];
        index[*slot] = i as u32;
        *slot += 1;
    }
    (offsets, index)
}

/// How arc weights are assigned when the source does not provide them.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum WeightRule {
    Uniform { lo: f64, hi: f64 },
    Constant(f64),
}

impl WeightRule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightRule::Uniform { lo, hi } => {
                if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
                    return Err(Error::Parameter(format!(
                        "uniform weight bounds [{lo}, {hi}] must satisfy 0 <= lo <= hi <= 1"
                    )));
                }
            }
            WeightRule::Constant(c) => {
                if !(0.0..=1.0).contains(&c) {
                    return Err(Error::Parameter(format!("constant weight {c} outside [0, 1]")));
                }
            }
        }
        Ok(())
    }

    pub fn draw(&self, rng: &mut Rng) -> f64 {
        match *self {
            WeightRule::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            WeightRule::Constant(c) => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case", tag = "kind"))]
pub enum GeneratorKind {
    /// Preferential attachment: each new node links to `attachment` distinct
    /// existing nodes chosen proportionally to degree. The first `initial`
    /// nodes start isolated; the first arriving node links to `attachment`
    /// of them drawn uniformly (all of them when `initial` is left unset).
    BarabasiAlbert {
        n: usize,
        attachment: usize,
        initial: Option<usize>,
    },
    BlockStochastic {
        sizes: Vec<usize>,
        p_intra: f64,
        q_inter: f64,
    },
    /// Two blocks: a dense core followed by a sparse periphery. Core nodes
    /// take ids `0..core`.
    CorePeriphery {
        core: usize,
        periphery: usize,
        p_core: f64,
        p_periphery: f64,
        q: f64,
    },
}

/// How a generated undirected edge becomes arcs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Orientation {
    /// Two opposing arcs sharing one weight.
    #[default]
    Both,
    /// One arc in a direction chosen by a fair coin.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeneratorSpec {
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub kind: GeneratorKind,
    pub weights: WeightRule,
    #[cfg_attr(feature = "serde", serde(default))]
    pub orientation: Orientation,
    pub seed: u64,
}

impl GeneratorSpec {
    /// The motivating core-periphery instance: 50 core and 150 periphery
    /// nodes, `p_C = 0.5`, `p_D = q = 0.1`, constant weight 0.05.
    pub fn core_periphery_default(seed: u64) -> Self {
        Self {
            kind: GeneratorKind::CorePeriphery {
                core: 50,
                periphery: 150,
                p_core: 0.5,
                p_periphery: 0.1,
                q: 0.1,
            },
            weights: WeightRule::Constant(0.05),
            orientation: Orientation::Both,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.weights.validate()?;
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::Parameter(format!("{name} = {p} outside [0, 1]")))
            }
        };
        match &self.kind {
            GeneratorKind::BarabasiAlbert {
                n,
                attachment,
                initial,
            } => {
                let initial = initial.unwrap_or(*attachment);
                if *attachment == 0 {
                    return Err(Error::Parameter("attachment count must be positive".into()));
                }
                if initial < *attachment {
                    return Err(Error::Parameter(format!(
                        "initial node count {initial} below attachment count {attachment}"
                    )));
                }
                if *n <= initial {
                    return Err(Error::Parameter(format!(
                        "n = {n} must exceed the initial node count {initial}"
                    )));
                }
            }
            GeneratorKind::BlockStochastic {
                sizes,
                p_intra,
                q_inter,
            } => {
                if sizes.is_empty() || sizes.contains(&0) {
                    return Err(Error::Parameter("block sizes must be non-empty and positive".into()));
                }
                prob("p", *p_intra)?;
                prob("q", *q_inter)?;
            }
            GeneratorKind::CorePeriphery {
                core,
                periphery,
                p_core,
                p_periphery,
                q,
            } => {
                if *core == 0 || *periphery == 0 {
                    return Err(Error::Parameter("core and periphery must be non-empty".into()));
                }
                prob("p_C", *p_core)?;
                prob("p_D", *p_periphery)?;
                prob("q", *q)?;
            }
        }
        Ok(())
    }
}

/// Generates a graph. Undirected edges become arcs per `spec.orientation`.
/// Output depends only on `spec`.
pub fn generate_graph(spec: &GeneratorSpec) -> Result<DirectedWeightedGraph> {
    spec.validate()?;
    let mut rng = rng::seeded(spec.seed);
    let (n, edges) = match &spec.kind {
        GeneratorKind::BarabasiAlbert {
            n,
            attachment,
            initial,
        } => (
            *n,
            barabasi_albert(*n, *attachment, initial.unwrap_or(*attachment), &mut rng),
        ),
        GeneratorKind::BlockStochastic {
            sizes,
            p_intra,
            q_inter,
        } => {
            let intra = vec![*p_intra; sizes.len()];
            (sizes.iter().sum(), block_model(sizes, &intra, *q_inter, &mut rng))
        }
        GeneratorKind::CorePeriphery {
            core,
            periphery,
            p_core,
            p_periphery,
            q,
        } => (
            core + periphery,
            block_model(&[*core, *periphery], &[*p_core, *p_periphery], *q, &mut rng),
        ),
    };
    let mut weight_rng = rng::stream(spec.seed, 1);
    let mut coin = rng::stream(spec.seed, 2);
    let mut arcs = Vec::with_capacity(edges.len() * 2);
    for (u, v) in edges {
        let weight = spec.weights.draw(&mut weight_rng);
        match spec.orientation {
            Orientation::Both => {
                arcs.push(Arc {
                    source: u,
                    target: v,
                    weight,
                });
                arcs.push(Arc {
                    source: v,
                    target: u,
                    weight,
                });
            }
            Orientation::Random => {
                let (source, target) = if coin.random::<bool>() { (u, v) } else { (v, u) };
                arcs.push(Arc { source, target, weight });
            }
        }
    }
    DirectedWeightedGraph::new(n, arcs)
}

fn barabasi_albert(n: usize, attachment: usize, initial: usize, rng: &mut Rng) -> Vec<(NodeId, NodeId)> {
    let mut edges = Vec::new();
    // Every endpoint occurrence, so a uniform pick is degree-proportional.
    let mut repeated: Vec<NodeId> = Vec::new();
    let mut targets: Vec<NodeId> = (0..initial as NodeId).collect();
    if initial > attachment {
        targets.shuffle(rng);
        targets.truncate(attachment);
        targets.sort_unstable();
    }
    for source in initial..n {
        for &t in &targets {
            edges.push((t, source as NodeId));
            repeated.push(t);
            repeated.push(source as NodeId);
        }
        let mut chosen = BTreeSet::new();
        while chosen.len() < attachment {
            chosen.insert(repeated[rng.random_range(0..repeated.len())]);
        }
        targets = chosen.into_iter().collect();
    }
    edges
}

fn block_model(sizes: &[usize], intra: &[f64], inter: f64, rng: &mut Rng) -> Vec<(NodeId, NodeId)> {
    let n: usize = sizes.iter().sum();
    let mut block = Vec::with_capacity(n);
    for (b, &s) in sizes.iter().enumerate() {
        block.extend(core::iter::repeat_n(b, s));
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if block[u] == block[v] { intra[block[u]] } else { inter };
            if rng.random::<f64>() < p {
                edges.push((u as NodeId, v as NodeId));
            }
        }
    }
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(source: NodeId, target: NodeId, weight: f64) -> Arc {
        Arc {
            source,
            target,
            weight,
        }
    }

    #[test]
    fn rejects_bad_arcs() {
        assert!(DirectedWeightedGraph::new(2, vec![arc(0, 1, 1.5)]).is_err());
        assert!(DirectedWeightedGraph::new(2, vec![arc(0, 2, 0.5)]).is_err());
        assert!(DirectedWeightedGraph::new(2, vec![arc(0, 1, 0.5), arc(0, 1, 0.2)]).is_err());
        assert!(DirectedWeightedGraph::new(2, vec![arc(0, 0, 0.5), arc(1, 0, 0.2)]).is_ok());
    }

    #[test]
    fn adjacency_matches_arcs() {
        let g = DirectedWeightedGraph::new(
            4,
            vec![arc(0, 1, 0.1), arc(2, 1, 0.2), arc(1, 3, 0.3), arc(0, 3, 0.4)],
        )
        .unwrap();
        let outs: Vec<_> = g.out_arcs(0).map(|a| a.target).collect();
        assert_eq!(outs, vec![1, 3]);
        let ins: Vec<_> = g.in_arcs(1).map(|a| a.source).collect();
        assert_eq!(ins, vec![0, 2]);
        assert_eq!(g.in_degree(3), 2);
        assert_eq!(g.out_degrees(), vec![2, 1, 1, 0]);
    }

    #[test]
    fn core_periphery_has_200_nodes() {
        let g = generate_graph(&GeneratorSpec::core_periphery_default(3)).unwrap();
        assert_eq!(g.n(), 200);
        assert!(g.arcs().iter().all(|a| a.weight == 0.05));
    }

    #[test]
    fn complete_block() {
        let spec = GeneratorSpec {
            kind: GeneratorKind::BlockStochastic {
                sizes: vec![3],
                p_intra: 1.0,
                q_inter: 0.0,
            },
            weights: WeightRule::Constant(1.0),
            orientation: Orientation::Both,
            seed: 0,
        };
        let g = generate_graph(&spec).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.arcs().len(), 6);
    }

    #[test]
    fn barabasi_albert_is_reproducible() {
        let spec = GeneratorSpec {
            kind: GeneratorKind::BarabasiAlbert {
                n: 40,
                attachment: 2,
                initial: None,
            },
            weights: WeightRule::Uniform { lo: 0.0, hi: 0.4 },
            orientation: Orientation::Both,
            seed: 11,
        };
        let a = generate_graph(&spec).unwrap();
        let b = generate_graph(&spec).unwrap();
        assert_eq!(a.arcs(), b.arcs());
        // (n - initial) arrivals, each adding `attachment` undirected edges.
        assert_eq!(a.arcs().len(), 2 * 2 * 38);
        for pair in a.arcs().chunks(2) {
            assert_eq!(pair[0].weight, pair[1].weight);
            assert!((0.0..=0.4).contains(&pair[0].weight));
        }
        let other = generate_graph(&GeneratorSpec { seed: 12, ..spec }).unwrap();
        assert_ne!(a.arcs(), other.arcs());
    }

    #[test]
    fn random_orientation_keeps_one_arc_per_edge() {
        let both = generate_graph(&GeneratorSpec::core_periphery_default(5)).unwrap();
        let one = generate_graph(&GeneratorSpec {
            orientation: Orientation::Random,
            ..GeneratorSpec::core_periphery_default(5)
        })
        .unwrap();
        assert_eq!(2 * one.arcs().len(), both.arcs().len());
        for a in one.arcs() {
            assert!(!one.out_arcs(a.target).any(|b| b.target == a.source));
        }
        let forward = one.arcs().iter().filter(|a| a.source < a.target).count();
        let frac = forward as f64 / one.arcs().len() as f64;
        assert!((frac - 0.5).abs() < 0.05, "{frac}");
    }

    #[test]
    fn invalid_parameters() {
        let mut spec = GeneratorSpec::core_periphery_default(0);
        spec.weights = WeightRule::Uniform { lo: 0.3, hi: 0.1 };
        assert!(matches!(generate_graph(&spec), Err(Error::Parameter(_))));
        let spec = GeneratorSpec {
            kind: GeneratorKind::BlockStochastic {
                sizes: vec![4],
                p_intra: 1.2,
                q_inter: 0.0,
            },
            weights: WeightRule::Constant(0.1),
            orientation: Orientation::Both,
            seed: 0,
        };
        assert!(matches!(generate_graph(&spec), Err(Error::Parameter(_))));
        let spec = GeneratorSpec {
            kind: GeneratorKind::BarabasiAlbert {
                n: 2,
                attachment: 2,
                initial: None,
            },
            weights: WeightRule::Constant(0.1),
            orientation: Orientation::Both,
            seed: 0,
        };
        assert!(generate_graph(&spec).is_err());
    }

    #[test]
    fn weak_component_and_induced() {
        let g = DirectedWeightedGraph::new(
            5,
            vec![arc(0, 1, 0.5), arc(2, 1, 0.5), arc(3, 4, 0.5)],
        )
        .unwrap();
        let keep = g.largest_weak_component();
        assert_eq!(keep, vec![0, 1, 2]);
        let sub = g.induced(&keep).unwrap();
        assert_eq!(sub.n(), 3);
        assert_eq!(sub.arcs().len(), 2);
    }
}
