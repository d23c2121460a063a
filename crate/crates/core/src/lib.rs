//! Randomized maximin-fair influence maximization.
//!
//! The crate samples live-edge graphs under the triggering model (independent
//! cascade and linear threshold), indexes who reaches whom in every sample, and
//! solves the node-based and set-based probabilistic maximin problems with
//! multiplicative-weights routines whose oracle is a lazy weighted greedy.
//!
//! Everything here is pure computation over in-memory data and builds without
//! `std` (with `alloc`). The `std` feature enables data-parallel sampling and
//! gain evaluation through rayon; results are identical with or without it.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod community;
pub mod diffusion;
pub mod error;
pub mod evaluation;
pub mod exact;
pub mod graph;
pub mod oracle;
pub mod rng;
pub mod solvers;

pub use community::{generate_communities, CommunityRule, CommunityStructure};
pub use diffusion::{
    required_samples, sample_live_edges, DiffusionModel, EstimatorParams, LiveEdgeSample, LiveGraph,
};
pub use error::{Error, Result};
pub use evaluation::{evaluate_strategy, empirical_pof, EvaluationReport, PofReport, Strategy};
pub use exact::ExactEvaluator;
pub use graph::{generate_graph, Arc, DirectedWeightedGraph, GeneratorKind, GeneratorSpec, Orientation, WeightRule};
pub use oracle::{weights_from_community_duals, greedy_maximin, greedy_weighted_im, myopic_fish, GreedyTrace, NodeWeights};
pub use solvers::{
    lambda_value, solve_node_based, solve_set_based, uniform_node_strategy, MwConfig, MwState, NodeStrategy,
    SetStrategy,
};

/// Dense node identifier, `0..n`.
pub type NodeId = u32;
