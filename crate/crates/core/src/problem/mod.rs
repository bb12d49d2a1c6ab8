//! Bipartite edge-labeling problems.
//!
//! A [`Problem`] is a pair of constraints over a shared alphabet: the active
//! side (the nodes that output labels) and the passive side. Each constraint
//! is a set of condensed [`Configuration`]s such as `M [OP]^2`, meaning a
//! multiset built by picking one member from every group slot.

mod json;
mod query;
mod text;

pub use json::{ConstraintJson, GroupJson, ProblemJson};
pub use query::{
    existential_fit, relaxation_check, strength_successors, universal, upgrading_relaxation,
    zero_round_solvable, ActiveUpgrade, PassiveImage, Refutation, RelaxationTranscript, RelaxationViolation,
    RefutationJson, ZeroRoundJson, ZeroRoundReport, UPGRADE_WORD_LIMIT,
};
pub(crate) use query::{active_words, upgrade_word, upgrading_relaxation_prepared};
pub use text::{format_problem, parse_problem, parse_problem_with_alphabet, ParseError};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::labels::{LabelId, LabelSet, Word, MAX_ALPHABET_CAP};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProblemError {
    #[error("invalid label name {0:?}")]
    InvalidLabelName(String),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("label id {0} outside the alphabet")]
    UnknownLabelId(LabelId),
    #[error("alphabet of {size} labels exceeds the cap of {cap}")]
    AlphabetCap { size: usize, cap: usize },
    #[error("group with no members")]
    EmptyGroup,
    #[error("group exponent must be at least 1")]
    ZeroExponent,
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("configuration of degree {found} in a constraint of degree {expected}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("label map is not total: no image for {0:?}")]
    MapNotTotal(String),
}

/// Which constraint of a problem.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Active,
    Passive,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Active => Side::Passive,
            Side::Passive => Side::Active,
        }
    }
}

impl std::str::FromStr for Side {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "active" | "white" => Ok(Side::Active),
            "passive" | "black" => Ok(Side::Passive),
            _ => Err(format!("unknown side {s:?}")),
        }
    }
}

/// One condensed slot group: `members` repeated `exp` times.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Group {
    pub members: LabelSet,
    pub exp: u32,
}

impl Group {
    pub fn new(members: LabelSet, exp: u32) -> Self {
        Group { members, exp }
    }
}

/// A condensed multiset pattern. Groups are kept sorted with equal member
/// sets merged.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Configuration {
    groups: Vec<Group>,
}

impl Configuration {
    pub fn new(groups: impl IntoIterator<Item = Group>) -> Result<Self, ProblemError> {
        let mut merged: BTreeMap<LabelSet, u32> = BTreeMap::new();
        for g in groups {
            if g.members.is_empty() {
                return Err(ProblemError::EmptyGroup);
            }
            if g.exp == 0 {
                return Err(ProblemError::ZeroExponent);
            }
            *merged.entry(g.members).or_insert(0) += g.exp;
        }
        Ok(Configuration {
            groups: merged.into_iter().map(|(members, exp)| Group { members, exp }).collect(),
        })
    }

    /// Configuration from a list of slots, one set per slot.
    pub fn from_slots(slots: &[LabelSet]) -> Result<Self, ProblemError> {
        Self::new(slots.iter().map(|&s| Group::new(s, 1)))
    }

    pub fn from_word(word: &Word) -> Self {
        Self::new(word.counts().into_iter().map(|(id, c)| Group::new(LabelSet::singleton(id), c)))
            .expect("word counts are positive")
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn degree(&self) -> usize {
        self.groups.iter().map(|g| g.exp as usize).sum()
    }

    /// Every slot as its member set, in group order.
    pub fn slots(&self) -> Vec<LabelSet> {
        self.groups
            .iter()
            .flat_map(|g| std::iter::repeat_n(g.members, g.exp as usize))
            .collect()
    }

    pub fn support(&self) -> LabelSet {
        self.groups.iter().fold(LabelSet::EMPTY, |acc, g| acc.union(g.members))
    }

    /// True when every group is a single label.
    pub fn is_plain(&self) -> bool {
        self.groups.iter().all(|g| g.members.len() == 1)
    }

    /// The plain word of a configuration whose groups are singletons.
    pub fn as_word(&self) -> Option<Word> {
        if !self.is_plain() {
            return None;
        }
        Some(Word::new(self.slots().iter().map(|s| s.iter().next().unwrap()).collect()))
    }

    pub fn map(&self, f: &[LabelId]) -> Configuration {
        Configuration::new(self.groups.iter().map(|g| Group::new(g.members.map(f), g.exp)))
            .expect("image of a valid configuration is valid")
    }

    /// All plain multisets obtained by choosing one member per slot.
    pub fn expand(&self) -> BTreeSet<Word> {
        let mut out = BTreeSet::new();
        out.insert(Word::default());
        for g in &self.groups {
            let members: Vec<LabelId> = g.members.iter().collect();
            let mut next = BTreeSet::new();
            for w in &out {
                crate::labels::for_each_multiset(members.len(), g.exp as usize, |pick| {
                    let mut v = w.ids().to_vec();
                    v.extend(pick.iter().map(|&i| members[i]));
                    next.insert(Word::new(v));
                });
            }
            out = next;
        }
        out
    }

    /// Membership by a perfect assignment of word occurrences to slots.
    pub fn admits(&self, word: &Word) -> bool {
        if word.len() != self.degree() {
            return false;
        }
        self.fits_partial(word)
    }

    /// True when `word` (possibly shorter than the degree) can be placed into
    /// distinct slots of this configuration.
    pub fn fits_partial(&self, word: &Word) -> bool {
        let counts = word.counts();
        let supply: Vec<u32> = counts.iter().map(|&(_, c)| c).collect();
        let capacity: Vec<u32> = self.groups.iter().map(|g| g.exp).collect();
        crate::transport::feasible(&supply, &capacity, |i, j| self.groups[j].members.contains(counts[i].0))
    }

    fn display<'a>(&'a self, names: &'a [String]) -> ConfigDisplay<'a> {
        ConfigDisplay { config: self, names }
    }
}

pub(crate) struct ConfigDisplay<'a> {
    config: &'a Configuration,
    names: &'a [String],
}

impl fmt::Display for ConfigDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.config.groups.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(&text::format_group(g.members, self.names))?;
            if g.exp > 1 {
                write!(f, "^{}", g.exp)?;
            }
        }
        Ok(())
    }
}

/// A set of condensed configurations of one common degree.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Constraint {
    degree: usize,
    configs: Vec<Configuration>,
}

impl Constraint {
    /// Builds a canonical constraint: configurations sorted, and any
    /// configuration whose expansion is contained in another's dropped (the
    /// lexicographically smaller one survives a tie).
    pub fn new(degree: usize, configs: impl IntoIterator<Item = Configuration>) -> Result<Self, ProblemError> {
        if degree == 0 {
            return Err(ProblemError::ZeroDegree);
        }
        let mut configs: Vec<Configuration> = configs.into_iter().collect();
        for c in &configs {
            if c.degree() != degree {
                return Err(ProblemError::DegreeMismatch { expected: degree, found: c.degree() });
            }
        }
        configs.sort();
        configs.dedup();
        let configs = drop_contained(configs);
        Ok(Constraint { degree, configs })
    }

    /// Constraint with no configurations at all (nothing is feasible).
    pub fn empty(degree: usize) -> Result<Self, ProblemError> {
        Self::new(degree, std::iter::empty())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn configs(&self) -> &[Configuration] {
        &self.configs
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn support(&self) -> LabelSet {
        self.configs.iter().fold(LabelSet::EMPTY, |acc, c| acc.union(c.support()))
    }

    /// Membership of a plain word.
    pub fn member(&self, word: &Word) -> Result<bool, ProblemError> {
        if word.len() != self.degree {
            return Err(ProblemError::DegreeMismatch { expected: self.degree, found: word.len() });
        }
        Ok(self.configs.iter().any(|c| c.fits_partial(word)))
    }

    /// True when the word is a sub-multiset of some feasible word.
    pub fn extendable(&self, word: &Word) -> bool {
        word.len() <= self.degree && self.configs.iter().any(|c| c.fits_partial(word))
    }

    /// Union of the expansions of all configurations.
    pub fn expand(&self) -> BTreeSet<Word> {
        self.configs.iter().flat_map(|c| c.expand()).collect()
    }

    pub fn map(&self, f: &[LabelId]) -> Constraint {
        Constraint::new(self.degree, self.configs.iter().map(|c| c.map(f))).expect("image keeps degree")
    }

    /// Same set of feasible words.
    pub fn same_language(&self, other: &Constraint) -> bool {
        self.degree == other.degree
            && self.configs.iter().all(|c| universal(&c.slots(), other).is_ok())
            && other.configs.iter().all(|c| universal(&c.slots(), self).is_ok())
    }

    fn remap(&self, f: &[LabelId]) -> Constraint {
        self.map(f)
    }
}

/// Removes configurations whose expansion is contained in another single
/// configuration.
fn drop_contained(configs: Vec<Configuration>) -> Vec<Configuration> {
    if configs.len() < 2 || configs.iter().all(Configuration::is_plain) {
        return configs;
    }
    let n = configs.len();
    let slots: Vec<Vec<LabelSet>> = configs.iter().map(Configuration::slots).collect();
    let supports: Vec<LabelSet> = configs.iter().map(Configuration::support).collect();
    let mut keep = vec![true; n];
    for i in 0..n {
        for j in 0..n {
            if i == j || !keep[j] || !supports[i].is_subset(supports[j]) {
                continue;
            }
            let single = Constraint { degree: configs[j].degree(), configs: vec![configs[j].clone()] };
            if universal(&slots[i], &single).is_ok() {
                // i inside j; on mutual containment the smaller (earlier) form wins
                let mutual = supports[j].is_subset(supports[i]) && {
                    let back = Constraint { degree: configs[i].degree(), configs: vec![configs[i].clone()] };
                    universal(&slots[j], &back).is_ok()
                };
                if !mutual || j < i {
                    keep[i] = false;
                    break;
                }
            }
        }
    }
    configs.into_iter().zip(keep).filter_map(|(c, k)| k.then_some(c)).collect()
}

/// A problem: alphabet plus active and passive constraints.
#[derive(Clone, Debug)]
pub struct Problem {
    alphabet: Vec<String>,
    active: Constraint,
    passive: Constraint,
    meta: Option<String>,
}

/// Equality ignores the provenance note.
impl PartialEq for Problem {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet && self.active == other.active && self.passive == other.passive
    }
}

impl Eq for Problem {}

pub(crate) fn valid_label_name(name: &str) -> bool {
    !name.is_empty()
        && name.chars().all(|c| !c.is_whitespace() && !matches!(c, '[' | ']' | '|' | '^' | ':' | '"'))
}

impl Problem {
    /// Builds a problem; the alphabet is sorted by name and constraint ids
    /// are remapped accordingly.
    pub fn new(
        alphabet: Vec<String>,
        active: Constraint,
        passive: Constraint,
        meta: Option<String>,
    ) -> Result<Self, ProblemError> {
        if alphabet.len() > MAX_ALPHABET_CAP {
            return Err(ProblemError::AlphabetCap { size: alphabet.len(), cap: MAX_ALPHABET_CAP });
        }
        let mut seen = std::collections::HashSet::new();
        for name in &alphabet {
            if !valid_label_name(name) {
                return Err(ProblemError::InvalidLabelName(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                return Err(ProblemError::DuplicateLabel(name.clone()));
            }
        }
        let full = LabelSet::full(alphabet.len());
        for c in active.configs.iter().chain(&passive.configs) {
            if !c.support().is_subset(full) {
                let bad = c.support().iter().find(|&id| id >= alphabet.len()).unwrap();
                return Err(ProblemError::UnknownLabelId(bad));
            }
        }
        let mut order: Vec<LabelId> = (0..alphabet.len()).collect();
        order.sort_by(|&a, &b| alphabet[a].cmp(&alphabet[b]));
        let mut remap = vec![0; alphabet.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new;
        }
        let sorted: Vec<String> = order.iter().map(|&i| alphabet[i].clone()).collect();
        let identity = remap.iter().enumerate().all(|(i, &r)| i == r);
        let (active, passive) = if identity {
            (active, passive)
        } else {
            (active.remap(&remap), passive.remap(&remap))
        };
        Ok(Problem { alphabet: sorted, active, passive, meta })
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn active(&self) -> &Constraint {
        &self.active
    }

    pub fn passive(&self) -> &Constraint {
        &self.passive
    }

    pub fn side(&self, side: Side) -> &Constraint {
        match side {
            Side::Active => &self.active,
            Side::Passive => &self.passive,
        }
    }

    pub fn meta(&self) -> Option<&str> {
        self.meta.as_deref()
    }

    pub fn with_meta(mut self, meta: impl Into<String>) -> Self {
        self.meta = Some(meta.into());
        self
    }

    pub fn label_id(&self, name: &str) -> Option<LabelId> {
        self.alphabet.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    pub fn label_name(&self, id: LabelId) -> &str {
        &self.alphabet[id]
    }

    /// Parses a whitespace-separated word such as `M O O`.
    pub fn word(&self, text: &str) -> Result<Word, ProblemError> {
        text.split_whitespace()
            .map(|t| self.label_id(t).ok_or_else(|| ProblemError::UnknownLabel(t.to_string())))
            .collect::<Result<Vec<_>, _>>()
            .map(Word::new)
    }

    pub fn word_names(&self, word: &Word) -> Vec<String> {
        word.ids().iter().map(|&i| self.alphabet[i].clone()).collect()
    }

    pub fn set_names(&self, set: LabelSet) -> Vec<String> {
        set.iter().map(|i| self.alphabet[i].clone()).collect()
    }

    /// Condensed text of one configuration.
    pub fn config_text(&self, config: &Configuration) -> String {
        config.display(&self.alphabet).to_string()
    }

    /// Condensed text of a constraint, configurations joined by `|`.
    pub fn constraint_text(&self, side: Side) -> String {
        self.side(side)
            .configs()
            .iter()
            .map(|c| self.config_text(c))
            .collect::<Vec<_>>()
            .join(" | ")
    }

    /// Resolves a name-keyed label map into an id table into `target`'s
    /// alphabet. Every label of this problem must have an image.
    pub fn resolve_map(&self, map: &BTreeMap<String, String>, target: &Problem) -> Result<Vec<LabelId>, ProblemError> {
        self.alphabet
            .iter()
            .map(|name| {
                let image = map.get(name).ok_or_else(|| ProblemError::MapNotTotal(name.clone()))?;
                target.label_id(image).ok_or_else(|| ProblemError::UnknownLabel(image.clone()))
            })
            .collect()
    }

    /// SHA-256 over the canonical JSON serialization, provenance excluded.
    pub fn digest(&self) -> String {
        let mut json = ProblemJson::from(self);
        json.meta = None;
        crate::hash::sha256_json(&json)
    }

    /// Same feasible words on both sides, alphabet names included.
    pub fn same_semantics(&self, other: &Problem) -> bool {
        self.alphabet == other.alphabet
            && self.active.same_language(&other.active)
            && self.passive.same_language(&other.passive)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_problem(self))
    }
}

/// Name-keyed label map, as exchanged over the CLI and HTTP surfaces.
pub type LabelMap = BTreeMap<String, String>;

pub(crate) fn id_lookup(names: &[String]) -> HashMap<&str, LabelId> {
    names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ids: &[usize]) -> LabelSet {
        ids.iter().copied().collect()
    }

    #[test]
    fn configuration_merges_equal_groups() {
        let c = Configuration::new([Group::new(set(&[1, 2]), 1), Group::new(set(&[0]), 1), Group::new(set(&[1, 2]), 2)])
            .unwrap();
        assert_eq!(c.groups(), &[Group::new(set(&[0]), 1), Group::new(set(&[1, 2]), 3)]);
        assert_eq!(c.degree(), 4);
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let c = Configuration::new([Group::new(set(&[2]), 2), Group::new(set(&[0, 1]), 1)]).unwrap();
        let again = Configuration::new(c.groups().iter().copied()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn zero_exponent_rejected() {
        assert_eq!(Configuration::new([Group::new(set(&[0]), 0)]), Err(ProblemError::ZeroExponent));
    }

    #[test]
    fn contained_configuration_is_dropped() {
        let big = Configuration::new([Group::new(set(&[0, 1]), 2)]).unwrap();
        let small = Configuration::new([Group::new(set(&[0]), 1), Group::new(set(&[1]), 1)]).unwrap();
        let c = Constraint::new(2, [big.clone(), small]).unwrap();
        assert_eq!(c.configs(), &[big]);
    }

    #[test]
    fn mutual_containment_keeps_smaller_form() {
        // [A B] [A B] written twice in different condensed shapes is not
        // possible, but a plain duplicate is removed
        let a = Configuration::new([Group::new(set(&[0, 1]), 2)]).unwrap();
        let c = Constraint::new(2, [a.clone(), a.clone()]).unwrap();
        assert_eq!(c.configs().len(), 1);
    }

    #[test]
    fn alphabet_is_sorted_and_remapped() {
        // ids: 0 = "P", 1 = "M"
        let active = Constraint::new(1, [Configuration::from_slots(&[set(&[0])]).unwrap()]).unwrap();
        let passive = Constraint::new(1, [Configuration::from_slots(&[set(&[1])]).unwrap()]).unwrap();
        let p = Problem::new(vec!["P".into(), "M".into()], active, passive, None).unwrap();
        assert_eq!(p.alphabet(), &["M".to_string(), "P".to_string()]);
        assert_eq!(p.constraint_text(Side::Active), "P");
        assert_eq!(p.constraint_text(Side::Passive), "M");
    }

    #[test]
    fn rejects_bad_names() {
        let c = Constraint::new(1, [Configuration::from_slots(&[set(&[0])]).unwrap()]).unwrap();
        let err = Problem::new(vec!["a b".into()], c.clone(), c, None).unwrap_err();
        assert!(matches!(err, ProblemError::InvalidLabelName(_)));
    }
}
