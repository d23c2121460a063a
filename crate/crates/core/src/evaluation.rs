//! Ex-ante / ex-post fairness, expected spread, price of fairness and
//! exhaustive reference optima for tiny instances.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::community::CommunityStructure;
use crate::diffusion::{DiffusionModel, LiveEdgeSample};
use crate::error::{Error, Result};
use crate::exact::ExactEvaluator;
use crate::graph::DirectedWeightedGraph;
use crate::oracle::{greedy_weighted_im, NodeWeights};
use crate::rng;
use crate::solvers::{NodeStrategy, SetStrategy};
use crate::NodeId;

/// Anything that can be evaluated: a randomized strategy or a fixed set.
#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    Node(NodeStrategy),
    Set(SetStrategy),
    Seeds(Vec<NodeId>),
}

impl Strategy {
    pub fn is_deterministic(&self) -> bool {
        match self {
            Strategy::Node(x) => x.x().iter().all(|&xi| xi == 0.0 || xi == 1.0),
            Strategy::Set(p) => p.support().len() == 1,
            Strategy::Seeds(_) => true,
        }
    }

    /// Largest node id the strategy refers to, used to check it against an
    /// instance.
    pub fn check_nodes(&self, n: usize) -> Result<()> {
        let bad = match self {
            Strategy::Node(x) => {
                if x.n() != n {
                    return Err(Error::Strategy(format!("strategy over {} nodes, instance has {n}", x.n())));
                }
                None
            }
            Strategy::Set(p) => p.max_node().filter(|&v| v as usize >= n),
            Strategy::Seeds(s) => s.iter().copied().find(|&v| v as usize >= n),
        };
        match bad {
            Some(v) => Err(Error::Strategy(format!("node {v} outside 0..{n}"))),
            None => Ok(()),
        }
    }

    /// `σ̃_v` of the strategy on a sample.
    pub fn sigma(&self, sample: &LiveEdgeSample) -> Vec<f64> {
        match self {
            Strategy::Node(x) => sample.sigma_node_strategy(x.x()),
            Strategy::Set(p) => sample.sigma_distribution(p.iter()),
            Strategy::Seeds(s) => sample.sigma_set(s),
        }
    }

    /// Exact `σ_v` by enumeration.
    pub fn exact_sigma(&self, exact: &ExactEvaluator) -> Result<Vec<f64>> {
        match self {
            Strategy::Node(x) => exact.sigma_node_strategy(x.x()),
            Strategy::Set(p) => Ok(exact.sigma_distribution(p.iter())),
            Strategy::Seeds(s) => Ok(exact.sigma_set(s)),
        }
    }

    /// One seed set drawn from the strategy.
    pub fn draw(&self, seed: u64) -> Vec<NodeId> {
        match self {
            Strategy::Node(x) => x.sample(seed),
            Strategy::Set(p) => p.sample(seed),
            Strategy::Seeds(s) => s.clone(),
        }
    }
}

pub fn min_value(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvaluationReport {
    pub algorithm: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub t_opt: usize,
    pub t_eval: usize,
    /// `min_C σ̃_C(strategy)`.
    pub ex_ante_min: f64,
    /// `min_C σ̃_C(S0)` for the one drawn set `S0`.
    pub ex_post_min: f64,
    pub ex_ante: Vec<f64>,
    pub ex_post: Vec<f64>,
    /// `Σ_v σ̃_v(strategy)`.
    pub expected_spread: f64,
    pub draw_seed: u64,
    pub drawn: Vec<NodeId>,
    pub runtime_ms: f64,
    /// Seed from which the samples and the draw were derived.
    pub seed: u64,
}

/// Evaluates a strategy on an evaluation sample that must be independent of
/// the one used for optimization. Fills everything but the label, the
/// optimization sample size, the run seed and the runtime.
pub fn evaluate_strategy(
    strategy: &Strategy,
    sample: &LiveEdgeSample,
    communities: &CommunityStructure,
    draw_seed: u64,
) -> Result<EvaluationReport> {
    strategy.check_nodes(sample.n())?;
    if communities.n() != sample.n() {
        return Err(Error::Parameter(format!(
            "communities over {} nodes, sample over {}",
            communities.n(),
            sample.n()
        )));
    }
    let sigma = strategy.sigma(sample);
    let ex_ante = communities.average(&sigma);
    let drawn = strategy.draw(draw_seed);
    let ex_post = if strategy.is_deterministic() {
        ex_ante.clone()
    } else {
        communities.average(&sample.sigma_set(&drawn))
    };
    let k = match strategy {
        Strategy::Node(x) => x.budget(),
        Strategy::Set(p) => p.budget(),
        Strategy::Seeds(s) => s.len(),
    };
    Ok(EvaluationReport {
        algorithm: String::new(),
        n: sample.n(),
        m: communities.len(),
        k,
        t_opt: 0,
        t_eval: sample.len(),
        ex_ante_min: min_value(&ex_ante),
        ex_post_min: min_value(&ex_post),
        ex_ante,
        ex_post,
        expected_spread: sigma.iter().sum(),
        draw_seed,
        drawn,
        runtime_ms: 0.0,
        seed: 0,
    })
}

/// Ex-post minima of `draws` independent draws, the `i`-th seeded by
/// `derive(seed, i)`.
pub fn ex_post_draws(
    strategy: &Strategy,
    sample: &LiveEdgeSample,
    communities: &CommunityStructure,
    seed: u64,
    draws: usize,
) -> Vec<f64> {
    (0..draws as u64)
        .map(|i| {
            let s = strategy.draw(rng::derive(seed, i));
            min_value(&communities.average(&sample.sigma_set(&s)))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PofReport {
    /// `σ̃` of the greedy influence-maximization set of size `k`.
    pub numerator: f64,
    /// `σ̃` of the fair strategy.
    pub denominator: f64,
    pub ratio: f64,
    /// Set when the denominator is zero and the ratio is reported as +∞.
    pub infinite: bool,
}

/// Price of fairness of one computed fair strategy against the greedy
/// spread maximizer, both on the same sample.
pub fn empirical_pof(sample: &LiveEdgeSample, fair: &Strategy, k: usize) -> Result<PofReport> {
    fair.check_nodes(sample.n())?;
    let greedy = greedy_weighted_im(sample, &NodeWeights::ones(sample.n()), k)?;
    let numerator = greedy.value(k);
    let denominator: f64 = fair.sigma(sample).iter().sum();
    Ok(pof_ratio(numerator, denominator))
}

pub fn pof_ratio(numerator: f64, denominator: f64) -> PofReport {
    if denominator > 0.0 {
        PofReport {
            numerator,
            denominator,
            ratio: numerator / denominator,
            infinite: false,
        }
    } else {
        PofReport {
            numerator,
            denominator,
            ratio: f64::INFINITY,
            infinite: true,
        }
    }
}

/// Best node-based maximin value by grid search over `x` with `Σ x <= k`,
/// evaluated exactly. At most 3 nodes.
pub fn bruteforce_opt_node(
    graph: &DirectedWeightedGraph,
    model: DiffusionModel,
    communities: &CommunityStructure,
    k: usize,
    resolution: f64,
) -> Result<f64> {
    let n = graph.n();
    if n > 3 {
        return Err(Error::Size(format!("{n} nodes; grid search supports at most 3")));
    }
    if !(resolution > 0.0 && resolution <= 1.0) {
        return Err(Error::Parameter(format!("grid resolution {resolution} outside (0, 1]")));
    }
    let exact = ExactEvaluator::new(graph, model)?;
    let table = exact.sigma_all_subsets()?;
    let steps = libm::round(1.0 / resolution) as usize;
    let budget_steps = k * steps;
    let mut best = f64::NEG_INFINITY;
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0; n];
    loop {
        if idx.iter().sum::<usize>() <= budget_steps {
            for (xi, &i) in x.iter_mut().zip(&idx) {
                *xi = i as f64 / steps as f64;
            }
            let sigma = exact.sigma_node_strategy_with(&table, &x);
            best = best.max(min_value(&communities.average(&sigma)));
        }
        let mut d = 0;
        while d < n {
            idx[d] += 1;
            if idx[d] <= steps {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
        if d == n {
            break;
        }
    }
    Ok(best)
}

/// Step and iteration count used by [`bruteforce_opt_set`].
pub const BRUTEFORCE_SET_ETA: f64 = 0.005;
pub const BRUTEFORCE_SET_ITERATIONS: usize = 200_000;

/// Set-based maximin optimum of a tiny instance (at most 4 nodes), solved by
/// multiplicative weights with an exact oracle over all subsets.
pub fn bruteforce_opt_set(
    graph: &DirectedWeightedGraph,
    model: DiffusionModel,
    communities: &CommunityStructure,
    k: usize,
) -> Result<f64> {
    bruteforce_opt_set_with(
        graph,
        model,
        communities,
        k,
        BRUTEFORCE_SET_ETA,
        BRUTEFORCE_SET_ITERATIONS,
    )
}

pub fn bruteforce_opt_set_with(
    graph: &DirectedWeightedGraph,
    model: DiffusionModel,
    communities: &CommunityStructure,
    k: usize,
    eta: f64,
    iterations: usize,
) -> Result<f64> {
    let n = graph.n();
    if n > 4 {
        return Err(Error::Size(format!("{n} nodes; exhaustive set search supports at most 4")));
    }
    if k == 0 {
        return Err(Error::Parameter("budget must be positive".into()));
    }
    let exact = ExactEvaluator::new(graph, model)?;
    let m = communities.len();
    let by_subset: Vec<Vec<f64>> = exact
        .sigma_all_subsets()?
        .iter()
        .map(|sigma| communities.average(sigma))
        .collect();
    let size = |s: usize| s.count_ones() as usize;

    let mut z = vec![1.0 / m as f64; m];
    let mut running = vec![0.0; m];
    let mut best_of_size = vec![(f64::NEG_INFINITY, 0usize); n + 1];
    for _ in 0..iterations {
        best_of_size.iter_mut().for_each(|b| *b = (f64::NEG_INFINITY, 0));
        for (s, f) in by_subset.iter().enumerate() {
            let score: f64 = z.iter().zip(f).map(|(a, b)| a * b).sum();
            let slot = &mut best_of_size[size(s)];
            if score > slot.0 {
                *slot = (score, s);
            }
        }
        // The oracle optimum over distributions with expected size <= k
        // mixes at most two sizes i <= k <= j.
        let mut choice: (f64, [(usize, f64); 2]) = (f64::NEG_INFINITY, [(0, 0.0); 2]);
        for i in 0..=k.min(n) {
            let (fi, si) = best_of_size[i];
            if fi > choice.0 {
                choice = (fi, [(si, 1.0), (si, 0.0)]);
            }
            for (j, &(fj, sj)) in best_of_size.iter().enumerate().skip(k + 1) {
                let q = (k - i) as f64 / (j - i) as f64;
                let v = (1.0 - q) * fi + q * fj;
                if v > choice.0 {
                    choice = (v, [(si, 1.0 - q), (sj, q)]);
                }
            }
        }
        let mut f = vec![0.0; m];
        for &(s, w) in &choice.1 {
            for (fc, &v) in f.iter_mut().zip(&by_subset[s]) {
                *fc += w * v;
            }
        }
        for ((zc, r), &fc) in z.iter_mut().zip(running.iter_mut()).zip(&f) {
            *zc *= libm::exp(-eta * fc);
            *r += fc;
        }
        let norm: f64 = z.iter().sum();
        z.iter_mut().for_each(|zc| *zc = (*zc / norm).max(f64::MIN_POSITIVE));
    }
    Ok(running
        .iter()
        .map(|r| r / iterations as f64)
        .fold(f64::INFINITY, f64::min))
}
