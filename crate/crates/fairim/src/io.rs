//! File formats: edge lists, community files, and JSON fixtures for graphs,
//! live-edge samples, strategies and solver traces.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use fairim_core::evaluation::Strategy;
use fairim_core::{
    rng, Arc, CommunityStructure, DirectedWeightedGraph, LiveEdgeSample, MwState, NodeId, NodeStrategy,
    SetStrategy, WeightRule,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|source| json_error(path, source))
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_with(path, |w| serde_json::to_writer_pretty(&mut *w, value))
}

/// Single-line JSON, for files that can get large.
pub fn write_json_compact<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_with(path, |w| serde_json::to_writer(&mut *w, value))
}

fn write_with(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> serde_json::Result<()>,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).map_err(|source| json_error(path, source))?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

fn json_error(path: &Path, source: serde_json::Error) -> Error {
    if source.is_io() {
        Error::io(path, source.into())
    } else {
        Error::Json {
            path: path.into(),
            source,
        }
    }
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.into(),
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeListOptions {
    /// Store every line as two opposing arcs.
    pub undirected: bool,
    /// Weight for lines without a third column.
    pub weights: WeightRule,
    pub seed: u64,
    /// Keep only the largest weakly connected component.
    pub lwcc: bool,
}

impl EdgeListOptions {
    pub fn new(weights: WeightRule, seed: u64) -> Self {
        Self {
            undirected: false,
            weights,
            seed,
            lwcc: false,
        }
    }
}

/// A graph read from a file, with the original label of every dense id.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedGraph {
    pub graph: DirectedWeightedGraph,
    pub ids: Vec<u64>,
    /// Labels removed by the component restriction.
    pub dropped: Vec<u64>,
    /// Repeated `(u, v)` arcs that were skipped; the first occurrence wins.
    pub duplicates: usize,
}

impl LoadedGraph {
    fn index(&self) -> HashMap<u64, NodeId> {
        self.ids.iter().enumerate().map(|(i, &id)| (id, i as NodeId)).collect()
    }
}

pub fn load_edge_list(path: &Path, opts: &EdgeListOptions) -> Result<LoadedGraph> {
    parse_edge_list(&read_text(path)?, path, opts)
}

/// Parses whitespace-separated `u v [w]` lines; `#` starts a comment line.
/// Labels are remapped to `0..n` in order of first appearance. `path` is
/// only used in error messages.
pub fn parse_edge_list(text: &str, path: &Path, opts: &EdgeListOptions) -> Result<LoadedGraph> {
    opts.weights.validate()?;
    let mut rng = rng::seeded(opts.seed);
    let mut index: HashMap<u64, NodeId> = HashMap::new();
    let mut ids = Vec::new();
    let mut seen = HashSet::new();
    let mut arcs = Vec::new();
    let mut duplicates = 0;
    let mut id_of = |label: u64| match index.entry(label) {
        Entry::Occupied(e) => *e.get(),
        Entry::Vacant(e) => {
            ids.push(label);
            *e.insert(ids.len() as NodeId - 1)
        }
    };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(parse_error(path, i + 1, format!("expected `u v [w]`, found `{line}`")));
        }
        let label = |s: &str| {
            s.parse::<u64>()
                .map_err(|_| parse_error(path, i + 1, format!("node id `{s}` is not a non-negative integer")))
        };
        let (u, v) = (label(fields[0])?, label(fields[1])?);
        let weight = match fields.get(2) {
            Some(s) => match s.parse::<f64>() {
                Ok(w) if (0.0..=1.0).contains(&w) => w,
                _ => return Err(parse_error(path, i + 1, format!("weight `{s}` is not a number in [0, 1]"))),
            },
            None => opts.weights.draw(&mut rng),
        };
        let (u, v) = (id_of(u), id_of(v));
        let mut push = |source: NodeId, target: NodeId| {
            if seen.insert((source, target)) {
                arcs.push(Arc { source, target, weight });
            } else {
                duplicates += 1;
            }
        };
        push(u, v);
        if opts.undirected && u != v {
            push(v, u);
        }
    }
    let graph = DirectedWeightedGraph::new(ids.len(), arcs)?;
    let mut loaded = LoadedGraph {
        graph,
        ids,
        dropped: Vec::new(),
        duplicates,
    };
    if opts.lwcc && loaded.graph.n() > 0 {
        let keep = loaded.graph.largest_weak_component();
        let mut kept = vec![false; loaded.ids.len()];
        keep.iter().for_each(|&v| kept[v as usize] = true);
        loaded.dropped = (0..loaded.ids.len()).filter(|&v| !kept[v]).map(|v| loaded.ids[v]).collect();
        loaded.graph = loaded.graph.induced(&keep)?;
        loaded.ids = keep.iter().map(|&v| loaded.ids[v as usize]).collect();
    }
    Ok(loaded)
}

/// Column order of a community file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnOrder {
    /// `community_id node_id`
    #[default]
    CommunityFirst,
    /// `node_id community_id`
    NodeFirst,
}

/// Reads a two-column community file whose node ids are already dense.
pub fn load_communities(path: &Path, n: usize, order: ColumnOrder) -> Result<CommunityStructure> {
    parse_communities(&read_text(path)?, path, n, order, |id| {
        if id < n as u64 {
            Ok(Some(id as NodeId))
        } else {
            Err(format!("node {id} outside 0..{n}"))
        }
    })
}

/// Reads a community file whose node ids are the labels of an edge list.
/// Labels removed by the component restriction are skipped.
pub fn load_communities_for(path: &Path, graph: &LoadedGraph, order: ColumnOrder) -> Result<CommunityStructure> {
    let index = graph.index();
    let dropped: HashSet<u64> = graph.dropped.iter().copied().collect();
    parse_communities(&read_text(path)?, path, graph.graph.n(), order, |id| match index.get(&id) {
        Some(&v) => Ok(Some(v)),
        None if dropped.contains(&id) => Ok(None),
        None => Err(format!("node {id} does not occur in the graph")),
    })
}

/// Communities come out ordered by community id; nodes absent from the file
/// belong to none.
pub fn parse_communities(
    text: &str,
    path: &Path,
    n: usize,
    order: ColumnOrder,
    resolve: impl Fn(u64) -> std::result::Result<Option<NodeId>, String>,
) -> Result<CommunityStructure> {
    let mut groups: BTreeMap<u64, Vec<NodeId>> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || parse_error(path, i + 1, format!("expected two integers, found `{line}`"));
        let fields: Vec<u64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        let [a, b] = fields[..] else {
            return Err(bad());
        };
        let (community, node) = match order {
            ColumnOrder::CommunityFirst => (a, b),
            ColumnOrder::NodeFirst => (b, a),
        };
        if let Some(v) = resolve(node).map_err(|m| parse_error(path, i + 1, m))? {
            groups.entry(community).or_default().push(v);
        }
    }
    Ok(CommunityStructure::new(n, groups.into_values().collect())?)
}

/// Graph fixture: `{n, arcs: [[u, v, w], ...], communities: [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub arcs: Vec<(NodeId, NodeId, f64)>,
    #[serde(default)]
    pub communities: Vec<Vec<NodeId>>,
    /// Original labels, when the graph came from an edge list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ids: Option<Vec<u64>>,
    /// Seed the graph was generated with.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A graph with its communities, if any were stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub graph: DirectedWeightedGraph,
    pub communities: Option<CommunityStructure>,
    pub ids: Option<Vec<u64>>,
    pub seed: Option<u64>,
}

impl GraphFile {
    pub fn new(graph: &DirectedWeightedGraph, communities: Option<&CommunityStructure>) -> Self {
        Self {
            n: graph.n(),
            arcs: graph.arcs().iter().map(|a| (a.source, a.target, a.weight)).collect(),
            communities: communities.map_or_else(Vec::new, |c| c.iter().map(<[NodeId]>::to_vec).collect()),
            ids: None,
            seed: None,
        }
    }

    pub fn into_instance(self) -> Result<Instance> {
        let arcs = self
            .arcs
            .into_iter()
            .map(|(source, target, weight)| Arc { source, target, weight })
            .collect();
        let graph = DirectedWeightedGraph::new(self.n, arcs)?;
        let communities = if self.communities.is_empty() {
            None
        } else {
            Some(CommunityStructure::new(self.n, self.communities)?)
        };
        if let Some(ids) = &self.ids {
            if ids.len() != self.n {
                return Err(Error::Config(format!("{} labels given for {} nodes", ids.len(), self.n)));
            }
        }
        Ok(Instance {
            graph,
            communities,
            ids: self.ids,
            seed: self.seed,
        })
    }
}

pub fn write_graph(path: &Path, file: &GraphFile) -> Result<()> {
    write_json_compact(path, file)
}

pub fn read_graph(path: &Path) -> Result<Instance> {
    read_json::<GraphFile>(path)?.into_instance()
}

/// Live-edge sample fixture: `{n, seed, out_degree, samples: [[[u, v], ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleFile {
    pub n: usize,
    pub seed: u64,
    pub out_degree: Vec<u32>,
    pub samples: Vec<Vec<(NodeId, NodeId)>>,
}

impl From<&LiveEdgeSample> for SampleFile {
    fn from(sample: &LiveEdgeSample) -> Self {
        Self {
            n: sample.n(),
            seed: sample.seed(),
            out_degree: sample.out_degree().to_vec(),
            samples: sample.graphs().iter().map(|g| g.live_arcs().to_vec()).collect(),
        }
    }
}

impl SampleFile {
    pub fn into_sample(self) -> Result<LiveEdgeSample> {
        Ok(LiveEdgeSample::from_live_arcs(self.n, self.seed, self.out_degree, self.samples)?)
    }
}

pub fn write_sample(path: &Path, sample: &LiveEdgeSample) -> Result<()> {
    write_json_compact(path, &SampleFile::from(sample))
}

pub fn read_sample(path: &Path) -> Result<LiveEdgeSample> {
    read_json::<SampleFile>(path)?.into_sample()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportEntry {
    pub set: Vec<NodeId>,
    pub p: f64,
}

/// Strategy fixture: `{kind: "node", k, x}` or `{kind: "set", k, support}`.
/// Fixed seed sets are stored as a one-point set strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StrategyFile {
    Node { k: usize, x: Vec<f64> },
    Set { k: usize, support: Vec<SupportEntry> },
}

impl From<&Strategy> for StrategyFile {
    fn from(strategy: &Strategy) -> Self {
        match strategy {
            Strategy::Node(x) => StrategyFile::Node {
                k: x.budget(),
                x: x.x().to_vec(),
            },
            Strategy::Set(p) => StrategyFile::Set {
                k: p.budget(),
                support: p
                    .iter()
                    .map(|(set, p)| SupportEntry { set: set.to_vec(), p })
                    .collect(),
            },
            Strategy::Seeds(s) => {
                let mut set = s.clone();
                set.sort_unstable();
                StrategyFile::Set {
                    k: s.len(),
                    support: vec![SupportEntry { set, p: 1.0 }],
                }
            }
        }
    }
}

impl StrategyFile {
    pub fn into_strategy(self) -> Result<Strategy> {
        Ok(match self {
            StrategyFile::Node { k, x } => Strategy::Node(NodeStrategy::new(x, k)?),
            StrategyFile::Set { k, support } => Strategy::Set(SetStrategy::new(
                support.into_iter().map(|e| (e.set, e.p)).collect(),
                k,
            )?),
        })
    }
}

pub fn write_strategy(path: &Path, strategy: &Strategy) -> Result<()> {
    write_json(path, &StrategyFile::from(strategy))
}

pub fn read_strategy(path: &Path) -> Result<Strategy> {
    read_json::<StrategyFile>(path)?.into_strategy()
}

/// What a multiplicative-weights run leaves behind, minus the per-iteration
/// sets (those are summarized by the strategy).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MwTrace {
    pub iterations: usize,
    pub stopped_early: bool,
    pub checkpoints: Vec<(usize, f64)>,
    pub z: Vec<f64>,
}

impl From<&MwState> for MwTrace {
    fn from(state: &MwState) -> Self {
        Self {
            iterations: state.iterations(),
            stopped_early: state.stopped_early,
            checkpoints: state.checkpoints.clone(),
            z: state.z.clone(),
        }
    }
}
