//! Community structures and the rules that synthesize them.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::DirectedWeightedGraph;
use crate::rng;
use crate::NodeId;

/// `m >= 1` non-empty node sets. Communities may overlap and need not cover
/// every node. Members are kept sorted and distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityStructure {
    n: usize,
    communities: Vec<Vec<NodeId>>,
}

impl CommunityStructure {
    pub fn new(n: usize, mut communities: Vec<Vec<NodeId>>) -> Result<Self> {
        if communities.is_empty() {
            return Err(Error::Community("at least one community is required".into()));
        }
        for (i, c) in communities.iter_mut().enumerate() {
            c.sort_unstable();
            c.dedup();
            if c.is_empty() {
                return Err(Error::Community(format!("community {i} is empty")));
            }
            if let Some(&bad) = c.iter().find(|&&v| v as usize >= n) {
                return Err(Error::Community(format!(
                    "community {i} contains node {bad} outside 0..{n}"
                )));
            }
        }
        Ok(Self { n, communities })
    }

    pub fn singletons(n: usize) -> Result<Self> {
        Self::new(n, (0..n as NodeId).map(|v| vec![v]).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    pub fn get(&self, i: usize) -> &[NodeId] {
        &self.communities[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[NodeId]> + '_ {
        self.communities.iter().map(Vec::as_slice)
    }

    pub fn into_inner(self) -> Vec<Vec<NodeId>> {
        self.communities
    }

    /// Averages a per-node vector over each community.
    pub fn average(&self, per_node: &[f64]) -> Vec<f64> {
        self.communities
            .iter()
            .map(|c| c.iter().map(|&v| per_node[v as usize]).sum::<f64>() / c.len() as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum CommunityRule {
    Singleton,
    /// `m` communities of `floor(n / m)` nodes grown by breadth-first search.
    Bfs(usize),
    /// Nodes shuffled and dealt into communities of the given sizes.
    RandomImbalanced(Vec<usize>),
}

pub fn generate_communities(
    graph: &DirectedWeightedGraph,
    rule: &CommunityRule,
    seed: u64,
) -> Result<CommunityStructure> {
    let n = graph.n();
    match rule {
        CommunityRule::Singleton => CommunityStructure::singletons(n),
        CommunityRule::Bfs(m) => bfs_communities(graph, *m, seed),
        CommunityRule::RandomImbalanced(sizes) => {
            let total: usize = sizes.iter().sum();
            if sizes.is_empty() || sizes.contains(&0) || total > n {
                return Err(Error::Parameter(format!(
                    "community sizes {sizes:?} must be positive and sum to at most n = {n}"
                )));
            }
            let mut nodes: Vec<NodeId> = (0..n as NodeId).collect();
            nodes.shuffle(&mut rng::seeded(seed));
            let mut rest = nodes.as_slice();
            let mut communities = Vec::with_capacity(sizes.len());
            for &s in sizes {
                let (head, tail) = rest.split_at(s);
                communities.push(head.to_vec());
                rest = tail;
            }
            CommunityStructure::new(n, communities)
        }
    }
}

// Neighbourhoods ignore arc direction; a community is grown until it holds
// floor(n/m) nodes, restarting from a random unassigned node whenever the
// frontier runs dry.
fn bfs_communities(graph: &DirectedWeightedGraph, m: usize, seed: u64) -> Result<CommunityStructure> {
    let n = graph.n();
    if m == 0 || m > n {
        return Err(Error::Parameter(format!(
            "bfs community count {m} must lie in 1..={n}"
        )));
    }
    let size = n / m;
    let mut rng = rng::seeded(seed);
    let mut assigned = vec![false; n];
    let mut unassigned = n;
    let mut communities = Vec::with_capacity(m);
    for _ in 0..m {
        let mut members = Vec::with_capacity(size);
        let mut queue = VecDeque::new();
        while members.len() < size {
            let u = match queue.pop_front() {
                Some(u) => u,
                None => {
                    let pick = rng.random_range(0..unassigned);
                    let u = (0..n).filter(|&v| !assigned[v]).nth(pick).unwrap() as NodeId;
                    assigned[u as usize] = true;
                    unassigned -= 1;
                    members.push(u);
                    u
                }
            };
            let nbrs = graph
                .out_arcs(u)
                .map(|a| a.target)
                .chain(graph.in_arcs(u).map(|a| a.source));
            for w in nbrs {
                if members.len() == size {
                    break;
                }
                if !assigned[w as usize] {
                    assigned[w as usize] = true;
                    unassigned -= 1;
                    members.push(w);
                    queue.push_back(w);
                }
            }
        }
        communities.push(members);
    }
    CommunityStructure::new(n, communities)
}
