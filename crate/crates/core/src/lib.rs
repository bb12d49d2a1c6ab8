//! Round elimination on bipartite edge-labeling problems.

pub mod bounds;
pub mod certificate;
pub mod engine;
pub mod family;
pub mod hash;
pub mod labels;
pub mod problem;
pub mod sim;
mod transport;

pub use labels::{LabelId, LabelSet, Word, DEFAULT_ALPHABET_CAP, MAX_ALPHABET_CAP};
pub use problem::{parse_problem, Configuration, Constraint, Group, LabelMap, Problem, ProblemError, Side};

/// Log-domain bounds in double precision.
pub type ErrorBound64 = bounds::ErrorBound<f64>;
/// Log-domain bounds in single precision.
pub type ErrorBound32 = bounds::ErrorBound<f32>;
