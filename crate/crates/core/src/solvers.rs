//! Multiplicative-weights solvers for the probabilistic maximin problems.
//!
//! Both solvers run the same covering loop. Community duals `z` start
//! uniform; every iteration turns them into node weights
//! `ω_v = Σ_{C ∋ v} z_C / |C|`, asks the greedy oracle for a size-`k` set
//! `S_t` maximizing `σ̃^ω`, and downweights each community by
//! `exp(-η σ̃_C(S_t))`. The set-based solver returns the uniform distribution
//! over the oracle sets; the node-based solver returns their mean indicator
//! vector.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::community::CommunityStructure;
use crate::diffusion::LiveEdgeSample;
use crate::error::{Error, Result};
use crate::oracle::{greedy_with_coverage, weights_from_community_duals, ReachCounts};
use crate::rng;
use crate::NodeId;

const FEASIBILITY_SLACK: f64 = 1e-9;

/// Independent per-node seeding probabilities `x ∈ [0,1]^n`, `Σ x ≤ k`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeStrategy {
    x: Vec<f64>,
    budget: usize,
}

impl NodeStrategy {
    pub fn new(x: Vec<f64>, budget: usize) -> Result<Self> {
        if let Some((i, xi)) = x.iter().enumerate().find(|(_, xi)| !(0.0..=1.0).contains(*xi)) {
            return Err(Error::Strategy(format!("x[{i}] = {xi} outside [0, 1]")));
        }
        let total: f64 = x.iter().sum();
        if total > budget as f64 + FEASIBILITY_SLACK {
            return Err(Error::Strategy(format!(
                "seeding probabilities sum to {total}, above the budget {budget}"
            )));
        }
        Ok(Self { x, budget })
    }

    /// Indicator vector of `seeds` over `n` nodes.
    pub fn indicator(n: usize, seeds: &[NodeId], budget: usize) -> Result<Self> {
        let mut x = vec![0.0; n];
        for &s in seeds {
            if s as usize >= n {
                return Err(Error::Strategy(format!("seed {s} outside 0..{n}")));
            }
            x[s as usize] = 1.0;
        }
        Self::new(x, budget)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Draws `S` by including each node `i` independently with probability
    /// `x_i`.
    pub fn sample(&self, seed: u64) -> Vec<NodeId> {
        let mut rng = rng::seeded(seed);
        self.x
            .iter()
            .enumerate()
            .filter(|(_, &xi)| rng.random::<f64>() < xi)
            .map(|(i, _)| i as NodeId)
            .collect()
    }
}

/// Distribution over seed sets with finite support, `Σ p_S = 1` and expected
/// size at most `k`. Sets are stored sorted and distinct.
#[derive(Debug, Clone, PartialEq)]
pub struct SetStrategy {
    support: Vec<(Vec<NodeId>, f64)>,
    budget: usize,
}

impl SetStrategy {
    pub fn new(mut support: Vec<(Vec<NodeId>, f64)>, budget: usize) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::Strategy("empty support".into()));
        }
        for (set, p) in support.iter_mut() {
            if !(*p > 0.0 && *p <= 1.0 + FEASIBILITY_SLACK) {
                return Err(Error::Strategy(format!("support probability {p} outside (0, 1]")));
            }
            set.sort_unstable();
            set.dedup();
        }
        let total: f64 = support.iter().map(|s| s.1).sum();
        if (total - 1.0).abs() > FEASIBILITY_SLACK {
            return Err(Error::Strategy(format!("probabilities sum to {total}")));
        }
        let strategy = Self { support, budget };
        let size = strategy.expected_size();
        if size > budget as f64 + FEASIBILITY_SLACK {
            return Err(Error::Strategy(format!(
                "expected set size {size} exceeds the budget {budget}"
            )));
        }
        Ok(strategy)
    }

    pub fn single(seeds: Vec<NodeId>, budget: usize) -> Result<Self> {
        Self::new(vec![(seeds, 1.0)], budget)
    }

    pub fn support(&self) -> &[(Vec<NodeId>, f64)] {
        &self.support
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[NodeId], f64)> + '_ {
        self.support.iter().map(|(s, p)| (s.as_slice(), *p))
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn expected_size(&self) -> f64 {
        self.support.iter().map(|(s, p)| p * s.len() as f64).sum()
    }

    /// `Pr_{S~p}[v ∈ S]` for every node.
    pub fn marginals(&self, n: usize) -> Vec<f64> {
        let mut y = vec![0.0; n];
        for (set, p) in &self.support {
            for &v in set {
                y[v as usize] += p;
            }
        }
        y
    }

    pub fn max_node(&self) -> Option<NodeId> {
        self.support.iter().filter_map(|(s, _)| s.last().copied()).max()
    }

    /// Categorical draw over the support.
    pub fn sample(&self, seed: u64) -> Vec<NodeId> {
        let mut rng = rng::seeded(seed);
        let total: f64 = self.support.iter().map(|s| s.1).sum();
        let u = rng.random::<f64>() * total;
        let mut acc = 0.0;
        for (set, p) in &self.support {
            acc += p;
            if u < acc {
                return set.clone();
            }
        }
        self.support.last().unwrap().0.clone()
    }
}

/// `x_v = k / n` for every node.
pub fn uniform_node_strategy(n: usize, k: usize) -> Result<NodeStrategy> {
    if n == 0 || k > n {
        return Err(Error::Parameter(format!("budget k = {k} must lie in 0..={n}, n > 0")));
    }
    NodeStrategy::new(vec![k as f64 / n as f64; n], k)
}

/// Truncated-linear community surrogate
/// `λ_C(x) = mean_{v ∈ C} (1/T) Σ_t min(1, Σ_{i reaches v in L_t} x_i)`.
pub fn lambda_value(sample: &LiveEdgeSample, x: &NodeStrategy, communities: &CommunityStructure) -> Vec<f64> {
    communities.average(&sample.truncated_mass(x.x()))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MwConfig {
    /// Step parameter `η ∈ (0, 1)`.
    pub eta: f64,
    pub max_iterations: usize,
    /// Exact iteration count; disables early stopping.
    pub iterations: Option<usize>,
    /// Checkpoint spacing for the running minimum.
    pub check_every: usize,
    /// Number of trailing checkpoints inspected for convergence.
    pub window: usize,
    /// Relative spread of the windowed running minimum below which the loop
    /// stops.
    pub tolerance: f64,
}

impl Default for MwConfig {
    fn default() -> Self {
        Self {
            eta: 0.1,
            max_iterations: 5000,
            iterations: None,
            check_every: 10,
            window: 20,
            tolerance: 1e-3,
        }
    }
}

impl MwConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(Error::Parameter(format!("eta = {} must lie in (0, 1)", self.eta)));
        }
        if self.max_iterations == 0 || self.check_every == 0 || self.iterations == Some(0) {
            return Err(Error::Parameter("iteration counts must be positive".into()));
        }
        Ok(())
    }

    /// Iteration count before the cap: the explicit count if given, else
    /// `ceil(η^-2 · ln m · n / k)` (at least 1).
    pub fn planned_iterations(&self, n: usize, m: usize, k: usize) -> usize {
        self.iterations
            .unwrap_or_else(|| iteration_bound(self.eta, n, m, k).max(1))
    }
}

/// `ceil(η^-2 · ln m · n / k)`: the covering bound with width 1 and
/// `λ* >= k / n`.
pub fn iteration_bound(eta: f64, n: usize, m: usize, k: usize) -> usize {
    libm::ceil(libm::log(m as f64) * n as f64 / (k as f64 * eta * eta)) as usize
}

/// Trace of one multiplicative-weights run.
#[derive(Debug, Clone, PartialEq)]
pub struct MwState {
    /// Final normalized community duals.
    pub z: Vec<f64>,
    /// Oracle set of every iteration, sorted.
    pub history: Vec<Vec<NodeId>>,
    /// `(iteration, min_C mean_{s<=t} σ̃_C(S_s))` every `check_every` steps.
    pub checkpoints: Vec<(usize, f64)>,
    pub stopped_early: bool,
}

impl MwState {
    pub fn iterations(&self) -> usize {
        self.history.len()
    }
}

fn run_mw(
    sample: &LiveEdgeSample,
    communities: &CommunityStructure,
    k: usize,
    cfg: &MwConfig,
) -> Result<MwState> {
    cfg.validate()?;
    let n = sample.n();
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("budget k = {k} must lie in 1..={n}")));
    }
    if communities.n() != n {
        return Err(Error::Parameter(format!(
            "communities over {} nodes, sample over {n}",
            communities.n()
        )));
    }
    let m = communities.len();
    let planned = cfg.planned_iterations(n, m, k).min(cfg.max_iterations);
    let early_stop = cfg.iterations.is_none();

    let counts = ReachCounts::build(sample);
    let mut z = vec![1.0 / m as f64; m];
    let mut running = vec![0.0; m];
    let mut history = Vec::with_capacity(planned);
    let mut checkpoints = Vec::new();
    let mut stopped_early = false;
    for it in 1..=planned {
        let weights = weights_from_community_duals(&z, communities)?;
        let (trace, sigma) = greedy_with_coverage(sample, &weights, k, counts.as_ref())?;
        let covered = communities.average(&sigma);
        for ((zc, r), &f) in z.iter_mut().zip(running.iter_mut()).zip(&covered) {
            *zc *= libm::exp(-cfg.eta * f);
            *r += f;
        }
        let norm: f64 = z.iter().sum();
        z.iter_mut()
            .for_each(|zc| *zc = (*zc / norm).max(f64::MIN_POSITIVE));
        let mut set = trace.order().to_vec();
        set.sort_unstable();
        history.push(set);

        if it % cfg.check_every == 0 {
            let value = running
                .iter()
                .map(|r| r / it as f64)
                .fold(f64::INFINITY, f64::min);
            checkpoints.push((it, value));
            if early_stop && it < planned && converged(&checkpoints, cfg) {
                stopped_early = true;
                break;
            }
        }
    }
    Ok(MwState {
        z,
        history,
        checkpoints,
        stopped_early,
    })
}

fn converged(checkpoints: &[(usize, f64)], cfg: &MwConfig) -> bool {
    if cfg.window == 0 || checkpoints.len() < cfg.window {
        return false;
    }
    let tail = &checkpoints[checkpoints.len() - cfg.window..];
    let hi = tail.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    hi > 0.0 && (hi - lo) <= cfg.tolerance * hi
}

/// Set-based solver: uniform distribution over the oracle sets, duplicates
/// merged.
pub fn solve_set_based(
    sample: &LiveEdgeSample,
    communities: &CommunityStructure,
    k: usize,
    cfg: &MwConfig,
) -> Result<(SetStrategy, MwState)> {
    let state = run_mw(sample, communities, k, cfg)?;
    let mut counts: BTreeMap<&[NodeId], usize> = BTreeMap::new();
    for set in &state.history {
        *counts.entry(set.as_slice()).or_insert(0) += 1;
    }
    let total = state.history.len() as f64;
    let support = counts
        .into_iter()
        .map(|(set, c)| (set.to_vec(), c as f64 / total))
        .collect();
    let strategy = SetStrategy::new(support, k)?;
    Ok((strategy, state))
}

/// Node-based heuristic: mean indicator vector of the oracle sets.
pub fn solve_node_based(
    sample: &LiveEdgeSample,
    communities: &CommunityStructure,
    k: usize,
    cfg: &MwConfig,
) -> Result<(NodeStrategy, MwState)> {
    let state = run_mw(sample, communities, k, cfg)?;
    let mut x = vec![0.0; sample.n()];
    for set in &state.history {
        for &v in set {
            x[v as usize] += 1.0;
        }
    }
    let total = state.history.len() as f64;
    x.iter_mut().for_each(|xi| *xi /= total);
    let strategy = NodeStrategy::new(x, k)?;
    Ok((strategy, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::{sample_live_edges, DiffusionModel};
    use crate::graph::{Arc, DirectedWeightedGraph};

    fn two_node(w: f64, t: usize) -> LiveEdgeSample {
        let g = DirectedWeightedGraph::new(
            2,
            vec![
                Arc { source: 0, target: 1, weight: w },
                Arc { source: 1, target: 0, weight: w },
            ],
        )
        .unwrap();
        sample_live_edges(&g, DiffusionModel::IndependentCascade, t, 17).unwrap()
    }

    #[test]
    fn strategy_validation() {
        assert!(NodeStrategy::new(vec![0.5, 0.6], 1).is_err());
        assert!(NodeStrategy::new(vec![1.2], 2).is_err());
        assert!(NodeStrategy::new(vec![0.5, 0.5], 1).is_ok());
        assert!(SetStrategy::new(vec![], 1).is_err());
        assert!(SetStrategy::new(vec![(vec![0], 0.5)], 1).is_err());
        assert!(SetStrategy::new(vec![(vec![0, 1], 1.0)], 1).is_err());
        assert!(SetStrategy::new(vec![(vec![0, 1], 0.5), (vec![], 0.5)], 1).is_ok());
        assert!(SetStrategy::new(vec![(vec![0], 0.0), (vec![1], 1.0)], 1).is_err());
    }

    #[test]
    fn uniform_strategy() {
        assert_eq!(uniform_node_strategy(4, 1).unwrap().x(), &[0.25; 4]);
        assert_eq!(uniform_node_strategy(3, 3).unwrap().x(), &[1.0; 3]);
        assert!(uniform_node_strategy(200, 20).unwrap().x().iter().all(|&x| x == 0.1));
        assert!(uniform_node_strategy(2, 3).is_err());
    }

    #[test]
    fn sampling_degenerate_strategies() {
        let x = NodeStrategy::indicator(5, &[1, 3], 2).unwrap();
        for seed in 0..20 {
            assert_eq!(x.sample(seed), vec![1, 3]);
        }
        let zero = NodeStrategy::new(vec![0.0; 5], 1).unwrap();
        assert!(zero.sample(3).is_empty());
        let single = SetStrategy::single(vec![2, 0], 2).unwrap();
        assert_eq!(single.sample(9), vec![0, 2]);
    }

    #[test]
    fn iteration_bound_formula() {
        // ceil(100 * ln 2 * 2) = ceil(138.63)
        assert_eq!(iteration_bound(0.1, 2, 2, 1), 139);
        assert_eq!(MwConfig::default().planned_iterations(5, 1, 1), 1);
    }

    #[test]
    fn set_based_two_node_alternates() {
        let s = two_node(0.5, 2000);
        let c = CommunityStructure::singletons(2).unwrap();
        let (p, state) = solve_set_based(&s, &c, 1, &MwConfig::default()).unwrap();
        assert_eq!(p.support().len(), 2);
        assert!(state.iterations() <= 139);
        let value = c
            .average(&s.sigma_distribution(p.iter()))
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        assert!(value > 0.72, "{value}");
        assert!((p.expected_size() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn node_based_two_node_balances() {
        let s = two_node(0.5, 2000);
        let c = CommunityStructure::singletons(2).unwrap();
        let (x, _) = solve_node_based(&s, &c, 1, &MwConfig::default()).unwrap();
        assert!((x.x()[0] - 0.5).abs() < 0.06, "{:?}", x.x());
        assert!((x.x().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_community_repeats_one_set() {
        let s = two_node(0.3, 500);
        let c = CommunityStructure::new(2, vec![vec![0, 1]]).unwrap();
        let (p, _) = solve_set_based(&s, &c, 1, &MwConfig::default()).unwrap();
        assert_eq!(p.support().len(), 1);
        let (x, _) = solve_node_based(&s, &c, 1, &MwConfig::default()).unwrap();
        assert_eq!(x.x().iter().filter(|&&v| v == 1.0).count(), 1);
    }

    #[test]
    fn rejects_bad_budget_and_eta() {
        let s = two_node(0.3, 10);
        let c = CommunityStructure::singletons(2).unwrap();
        assert!(solve_set_based(&s, &c, 3, &MwConfig::default()).is_err());
        let cfg = MwConfig { eta: 1.0, ..MwConfig::default() };
        assert!(solve_node_based(&s, &c, 1, &cfg).is_err());
    }

    #[test]
    fn explicit_iterations_run_exactly() {
        let s = two_node(0.5, 100);
        let c = CommunityStructure::singletons(2).unwrap();
        let cfg = MwConfig { iterations: Some(37), ..MwConfig::default() };
        let (_, state) = solve_set_based(&s, &c, 1, &cfg).unwrap();
        assert_eq!(state.iterations(), 37);
        assert!(!state.stopped_early);
        assert!(state.z.iter().all(|&z| z > 0.0));
    }

    #[test]
    fn lambda_truncates() {
        let s = two_node(1.0, 3);
        let c = CommunityStructure::singletons(2).unwrap();
        let x = NodeStrategy::new(vec![0.7, 0.6], 2).unwrap();
        assert_eq!(lambda_value(&s, &x, &c), vec![1.0, 1.0]);
        let x = NodeStrategy::new(vec![0.3, 0.0], 1).unwrap();
        assert_eq!(lambda_value(&s, &x, &c), vec![0.3, 0.3]);
    }
}
