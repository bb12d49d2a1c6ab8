//! Speedup engine: strength orders, speedup steps, label merges,
//! equivalence and relaxation search.

mod equiv;
mod iterate;
mod merge;
mod poset;
mod relax_search;
mod speedup;

pub use equiv::{equivalent, EquivalenceMode, EXHAUSTIVE_LABEL_LIMIT};
pub use iterate::{iterate_speedup, IterateOutcome, MergeDecision, MergePolicy, StepRecord};
pub use merge::{merge_ids, merge_labels};
pub use poset::{strength_order, LabelPoset, PosetReport};
pub use relax_search::{find_relaxation_mapping, RelaxationSearch, DEFAULT_SEARCH_BUDGET};
pub use speedup::{set_label_name, speedup, speedup_with, SetLabel, SpeedupOptions, SpeedupResult};

use thiserror::Error;

use crate::problem::ProblemError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("alphabet of {size} labels exceeds the cap of {cap}")]
    AlphabetCap { size: usize, cap: usize },
    #[error("operation cancelled")]
    Cancelled,
    #[error("search budget of {0} candidate nodes exceeded")]
    BudgetExceeded(u64),
    #[error("exhaustive search refused for {labels} labels (limit {limit})")]
    ExhaustiveLimit { labels: usize, limit: usize },
    #[error("invalid merge script: {0}")]
    Script(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}
