//! Declarative experiment configuration (JSON) and command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fairim_core::{
    required_samples, CommunityRule, DiffusionModel, EstimatorParams, GeneratorKind, GeneratorSpec, MwConfig,
    Orientation, WeightRule,
};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::ColumnOrder;

/// Live-edge graphs per sample when neither a count nor `(ε, δ)` is given.
pub const DEFAULT_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    SetBased,
    NodeBased,
    Uniform,
    GreedyIm,
    GreedyMaximin,
    Myopic,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::SetBased,
        Algorithm::NodeBased,
        Algorithm::Uniform,
        Algorithm::GreedyIm,
        Algorithm::GreedyMaximin,
        Algorithm::Myopic,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::SetBased => "set-based",
            Algorithm::NodeBased => "node-based",
            Algorithm::Uniform => "uniform",
            Algorithm::GreedyIm => "greedy-im",
            Algorithm::GreedyMaximin => "greedy-maximin",
            Algorithm::Myopic => "myopic",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.label() == s)
            .ok_or_else(|| {
                let valid: Vec<_> = Algorithm::ALL.iter().map(|a| a.label()).collect();
                Error::Config(format!("unknown algorithm `{s}`; valid labels: {}", valid.join(", ")))
            })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum ModelName {
    #[default]
    #[serde(rename = "ic", alias = "independent-cascade")]
    Ic,
    #[serde(rename = "lt", alias = "linear-threshold")]
    Lt,
}

impl From<ModelName> for DiffusionModel {
    fn from(m: ModelName) -> Self {
        match m {
            ModelName::Ic => DiffusionModel::IndependentCascade,
            ModelName::Lt => DiffusionModel::LinearThreshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    /// Defaults to constant 0.05 for the block models and uniform on
    /// `[0, 0.4]` for preferential attachment.
    #[serde(default)]
    pub weights: Option<WeightRule>,
    #[serde(default)]
    pub orientation: Orientation,
}

impl GeneratorConfig {
    pub fn spec(&self, seed: u64) -> GeneratorSpec {
        let weights = self.weights.unwrap_or(match self.kind {
            GeneratorKind::BarabasiAlbert { .. } => WeightRule::Uniform { lo: 0.0, hi: 0.4 },
            _ => WeightRule::Constant(0.05),
        });
        GeneratorSpec {
            kind: self.kind.clone(),
            weights,
            orientation: self.orientation,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeListConfig {
    pub path: PathBuf,
    #[serde(default)]
    pub undirected: bool,
    /// Weights for lines without one; uniform on `[0, 0.2]` by default.
    #[serde(default)]
    pub weights: Option<WeightRule>,
    #[serde(default)]
    pub lwcc: bool,
}

impl EdgeListConfig {
    pub fn weights(&self) -> WeightRule {
        self.weights.unwrap_or(WeightRule::Uniform { lo: 0.0, hi: 0.2 })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceSource {
    Generator(GeneratorConfig),
    EdgeList(EdgeListConfig),
    /// A graph fixture as written by `generate`.
    Graph(PathBuf),
}

impl Default for InstanceSource {
    fn default() -> Self {
        let spec = GeneratorSpec::core_periphery_default(0);
        InstanceSource::Generator(GeneratorConfig {
            kind: spec.kind,
            weights: Some(spec.weights),
            orientation: spec.orientation,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommunitySource {
    Singleton,
    Bfs(usize),
    RandomImbalanced(Vec<usize>),
    File {
        path: PathBuf,
        #[serde(default)]
        order: ColumnOrder,
    },
}

impl CommunitySource {
    pub fn rule(&self) -> Option<CommunityRule> {
        match self {
            CommunitySource::Singleton => Some(CommunityRule::Singleton),
            CommunitySource::Bfs(m) => Some(CommunityRule::Bfs(*m)),
            CommunitySource::RandomImbalanced(sizes) => Some(CommunityRule::RandomImbalanced(sizes.clone())),
            CommunitySource::File { .. } => None,
        }
    }
}

fn default_k() -> Vec<usize> {
    vec![5]
}

fn default_algorithms() -> Vec<String> {
    vec!["set-based".into(), "greedy-im".into()]
}

fn default_eta() -> f64 {
    MwConfig::default().eta
}

fn default_max_iterations() -> usize {
    MwConfig::default().max_iterations
}

fn one() -> usize {
    1
}

fn one_f64() -> f64 {
    1.0
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub instance: InstanceSource,
    /// Falls back to the communities stored in a graph fixture, then to
    /// singletons.
    #[serde(default)]
    pub communities: Option<CommunitySource>,
    #[serde(default)]
    pub model: ModelName,
    #[serde(default = "default_k")]
    pub k: Vec<usize>,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<String>,
    #[serde(default)]
    pub t_opt: Option<usize>,
    #[serde(default)]
    pub t_eval: Option<usize>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
    /// Constant in front of the sample-count bound.
    #[serde(default = "one_f64")]
    pub multiplier: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    /// Fixed iteration count; disables early stopping.
    #[serde(default)]
    pub iterations: Option<usize>,
    /// Graph repetitions; graph `i` is built from seed `seed + i`.
    #[serde(default = "one")]
    pub graphs: usize,
    /// Sample repetitions per graph.
    #[serde(default = "one")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        crate::io::read_json(path)
    }

    pub fn algorithms(&self) -> Result<Vec<Algorithm>> {
        if self.algorithms.is_empty() {
            return Err(Error::Config("algorithm list is empty".into()));
        }
        self.algorithms.iter().map(|s| s.parse()).collect()
    }

    pub fn diffusion_model(&self) -> DiffusionModel {
        self.model.into()
    }

    pub fn mw_config(&self) -> MwConfig {
        MwConfig {
            eta: self.eta,
            max_iterations: self.max_iterations,
            iterations: self.iterations,
            ..MwConfig::default()
        }
    }

    /// `(T_opt, T_eval)` for an instance with `n` nodes: explicit counts
    /// first, then the bound from `(ε, δ)`, then [`DEFAULT_SAMPLES`].
    pub fn sample_counts(&self, n: usize) -> Result<(usize, usize)> {
        let bound = match (self.epsilon, self.delta) {
            (None, None) => DEFAULT_SAMPLES,
            (e, d) => {
                let params = EstimatorParams {
                    multiplier: self.multiplier,
                    ..EstimatorParams::new(e.unwrap_or(0.1), d.unwrap_or(0.1))
                };
                required_samples(&params, n)?
            }
        };
        Ok((self.t_opt.unwrap_or(bound), self.t_eval.unwrap_or(bound)))
    }

    pub fn validate(&self) -> Result<()> {
        self.algorithms()?;
        if self.k.is_empty() || self.k.contains(&0) {
            return Err(Error::Config("k list must be non-empty and positive".into()));
        }
        if self.graphs == 0 || self.runs == 0 {
            return Err(Error::Config("graph and run repetitions must be at least 1".into()));
        }
        if self.t_opt == Some(0) || self.t_eval == Some(0) {
            return Err(Error::Config("sample counts must be positive".into()));
        }
        if !(self.multiplier > 0.0 && self.multiplier.is_finite()) {
            return Err(Error::Config(format!("multiplier {} must be positive", self.multiplier)));
        }
        self.mw_config().validate()?;
        Ok(())
    }
}

/// Command-line overrides, applied on top of the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub algorithms: Option<Vec<String>>,
    pub k: Option<Vec<usize>>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub eta: Option<f64>,
    pub max_iterations: Option<usize>,
    pub t_opt: Option<usize>,
    pub t_eval: Option<usize>,
    pub model: Option<ModelName>,
    pub graphs: Option<usize>,
    pub runs: Option<usize>,
    pub instance: Option<InstanceSource>,
    pub communities: Option<CommunitySource>,
    pub undirected: bool,
    pub lwcc: bool,
}

impl Overrides {
    pub fn apply(self, cfg: &mut ExperimentConfig) -> Result<()> {
        if let Some(instance) = self.instance {
            cfg.instance = instance;
        }
        if self.undirected || self.lwcc {
            let InstanceSource::EdgeList(list) = &mut cfg.instance else {
                return Err(Error::Config("--undirected and --lwcc apply to edge-list instances only".into()));
            };
            list.undirected |= self.undirected;
            list.lwcc |= self.lwcc;
        }
        if self.epsilon.is_some() || self.delta.is_some() {
            cfg.t_opt = None;
            cfg.t_eval = None;
            cfg.epsilon = self.epsilon.or(cfg.epsilon);
            cfg.delta = self.delta.or(cfg.delta);
        }
        macro_rules! set {
            ($($field:ident <- $value:expr),* $(,)?) => {
                $(if let Some(v) = $value { cfg.$field = v; })*
            };
        }
        set!(
            seed <- self.seed,
            out <- self.out,
            algorithms <- self.algorithms,
            k <- self.k,
            eta <- self.eta,
            max_iterations <- self.max_iterations,
            model <- self.model,
            graphs <- self.graphs,
            runs <- self.runs,
        );
        if let Some(t) = self.t_opt {
            cfg.t_opt = Some(t);
        }
        if let Some(t) = self.t_eval {
            cfg.t_eval = Some(t);
        }
        if let Some(c) = self.communities {
            cfg.communities = Some(c);
        }
        cfg.validate()
    }
}
