//! Finite simulation and brute-force oracles.
//!
//! Port-numbered bipartite graphs (white = active, black = passive), the
//! proposal algorithm for maximal matching, node splitting, and checkers
//! that test labelings and edge sets directly.

mod brute;
mod check;
mod graph;
mod proposal;
mod split;

pub use brute::{brute_force_zero_round, one_round_active_solvable, BRUTE_DEGREE, BRUTE_LABELS};
pub use check::{check_solution, k_matching_check, k_matching_labeling, line_graph_mm, KMatchingReport, SideReport, SolutionReport};
pub use graph::{gen_instance, Boundary, Edge, InstanceKind, PortGraph, PortGraphJson, RNG_ALGORITHM};
pub use proposal::{mm_labeling, run_proposal, MatchingState, ProposalRun};
pub use split::{ceil_sqrt, split_nodes, uniform_parts, Parts, SplitMap};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("infeasible instance: {0}")]
    Infeasible(String),
    #[error("{labels} labels for {edges} edges")]
    LabelCount { edges: usize, labels: usize },
    #[error("edge {0} shares a node with an earlier matched edge")]
    NotAMatching(usize),
    #[error("matching state is not symmetric at white node {0}")]
    Asymmetric(usize),
    #[error("matching is not maximal: white {white} and black {black} are both unmatched neighbors")]
    NotMaximal { white: usize, black: usize },
    #[error("edges {0} and {1} share an endpoint")]
    NotIndependent(usize, usize),
    #[error("bad partition: {0}")]
    Partition(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("outside the exhaustive range ({labels} labels, degree {degree})")]
    OutOfRange { labels: usize, degree: usize },
}
