//! One speedup step.
//!
//! Nodes of the passive side of `p` become the active side of the result.
//! Their new labels are right-closed sets of old labels. The new active
//! constraint holds the maximal families of sets all of whose choice words
//! are feasible for the old passive side; the new passive constraint holds
//! every multiset of the surviving sets that has at least one choice word
//! feasible for the old active side.

use std::collections::{BTreeMap, HashSet};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::poset::LabelPoset;
use super::EngineError;
use crate::labels::{LabelSet, Word, DEFAULT_ALPHABET_CAP};
use crate::problem::{universal, Configuration, Constraint, Group, Problem};

/// A label of a speedup result: a set of labels of the origin problem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetLabel {
    pub name: String,
    pub members: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct SpeedupResult {
    pub problem: Problem,
    pub origin: Problem,
    /// One entry per label of `problem`, in alphabet order.
    pub dictionary: Vec<SetLabel>,
    /// Universally good families visited, maximal or not.
    pub families_checked: u64,
}

impl SpeedupResult {
    /// Members of a result label as a set over the origin alphabet.
    pub fn members_of(&self, label: &str) -> Option<LabelSet> {
        let id = self.problem.label_id(label)?;
        Some(self.dictionary[id].members.iter().filter_map(|m| self.origin.label_id(m)).collect())
    }

    pub fn dictionary_map(&self) -> BTreeMap<String, Vec<String>> {
        self.dictionary.iter().map(|s| (s.name.clone(), s.members.clone())).collect()
    }
}

#[derive(Clone, Debug)]
pub struct SpeedupOptions {
    pub alphabet_cap: usize,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for SpeedupOptions {
    fn default() -> Self {
        SpeedupOptions { alphabet_cap: DEFAULT_ALPHABET_CAP, cancel: None }
    }
}

/// Display name of a set label, e.g. `<M,O,X>`.
pub fn set_label_name(p: &Problem, set: LabelSet) -> String {
    format!("<{}>", p.set_names(set).join(","))
}

pub fn speedup(p: &Problem) -> Result<SpeedupResult, EngineError> {
    speedup_with(p, &SpeedupOptions::default())
}

pub fn speedup_with(p: &Problem, opts: &SpeedupOptions) -> Result<SpeedupResult, EngineError> {
    let cap = opts.alphabet_cap.min(crate::MAX_ALPHABET_CAP);
    if p.alphabet().len() > cap {
        return Err(EngineError::AlphabetCap { size: p.alphabet().len(), cap });
    }
    let poset = LabelPoset::of_constraint(p.passive(), p.alphabet().len());
    let sets = poset.right_closed_sets();
    let search = FamilySearch {
        sets: &sets,
        poset: &poset,
        passive: p.passive(),
        cancel: opts.cancel.as_deref(),
        visited: AtomicU64::new(0),
    };
    let per_first: Vec<Result<Vec<Vec<usize>>, EngineError>> =
        (0..sets.len()).into_par_iter().map(|i| search.from_first(i)).collect();
    let mut families = Vec::new();
    for r in per_first {
        families.extend(r?);
    }
    families.sort();
    tracing::debug!(sets = sets.len(), families = families.len(), "speedup families");

    let mut used: Vec<usize> = families.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();
    if used.len() > cap {
        return Err(EngineError::AlphabetCap { size: used.len(), cap });
    }
    let new_id = |set_index: usize| used.binary_search(&set_index).unwrap();
    let names: Vec<String> = used.iter().map(|&i| set_label_name(p, sets[i])).collect();
    let members: Vec<LabelSet> = used.iter().map(|&i| sets[i]).collect();

    let active_configs = families.iter().map(|f| Configuration::from_word(&Word::new(f.iter().map(|&i| new_id(i)).collect())));
    let active = Constraint::new(p.passive().degree(), active_configs)?;

    let mut passive_configs = Vec::new();
    for config in p.active().configs() {
        let groups: Option<Vec<Group>> = config
            .groups()
            .iter()
            .map(|g| {
                let admit: LabelSet = (0..members.len()).filter(|&k| members[k].intersects(g.members)).collect();
                (!admit.is_empty()).then_some(Group::new(admit, g.exp))
            })
            .collect();
        if let Some(groups) = groups {
            passive_configs.push(Configuration::new(groups)?);
        }
    }
    let passive = Constraint::new(p.active().degree(), passive_configs)?;

    let problem = Problem::new(names.clone(), active, passive, None)?;
    let dictionary = problem
        .alphabet()
        .iter()
        .map(|name| {
            let k = names.iter().position(|n| n == name).unwrap();
            SetLabel { name: name.clone(), members: p.set_names(members[k]) }
        })
        .collect();
    Ok(SpeedupResult {
        problem,
        origin: p.clone(),
        dictionary,
        families_checked: search.visited.load(Ordering::Relaxed),
    })
}

struct FamilySearch<'a> {
    sets: &'a [LabelSet],
    poset: &'a LabelPoset,
    passive: &'a Constraint,
    cancel: Option<&'a AtomicBool>,
    visited: AtomicU64,
}

impl FamilySearch<'_> {
    fn from_first(&self, first: usize) -> Result<Vec<Vec<usize>>, EngineError> {
        let mut out = Vec::new();
        let start: HashSet<Word> = std::iter::once(Word::default()).collect();
        if let Some(frontier) = self.extend(&start, self.sets[first]) {
            let mut family = vec![first];
            self.descend(first, &frontier, &mut family, &mut out)?;
        }
        Ok(out)
    }

    /// Extends every prefix word by one label of `set`; `None` as soon as
    /// some extension cannot be completed to a feasible word.
    fn extend(&self, frontier: &HashSet<Word>, set: LabelSet) -> Option<HashSet<Word>> {
        let mut next = HashSet::with_capacity(frontier.len() * set.len());
        for w in frontier {
            for x in set.iter() {
                let e = w.plus(x);
                if next.contains(&e) {
                    continue;
                }
                if !self.passive.extendable(&e) {
                    return None;
                }
                next.insert(e);
            }
        }
        Some(next)
    }

    fn descend(
        &self,
        last: usize,
        frontier: &HashSet<Word>,
        family: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<(), EngineError> {
        if self.cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
            return Err(EngineError::Cancelled);
        }
        if family.len() == self.passive.degree() {
            self.visited.fetch_add(1, Ordering::Relaxed);
            if self.is_maximal(family) {
                out.push(family.clone());
            }
            return Ok(());
        }
        for i in last..self.sets.len() {
            if let Some(next) = self.extend(frontier, self.sets[i]) {
                family.push(i);
                self.descend(i, &next, family, out)?;
                family.pop();
            }
        }
        Ok(())
    }

    /// No slot can be enlarged to a bigger right-closed set while keeping
    /// every choice word feasible.
    fn is_maximal(&self, family: &[usize]) -> bool {
        let slots: Vec<LabelSet> = family.iter().map(|&i| self.sets[i]).collect();
        let all = self.sets[0];
        let mut tried = HashSet::new();
        for k in 0..slots.len() {
            if !tried.insert(slots[k]) {
                continue;
            }
            let outside = LabelSet::from_bits(all.bits() & !slots[k].bits());
            for z in outside.iter() {
                let mut bigger = slots.clone();
                bigger[k] = self.poset.closure(slots[k].with(z));
                if universal(&bigger, self.passive).is_ok() {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::parse_problem;

    #[test]
    fn single_label_fixed_point() {
        let p = parse_problem("white: A A A\nblack: A A A").unwrap();
        let r = speedup(&p).unwrap();
        assert_eq!(r.problem.alphabet(), &["<A>".to_string()]);
        assert_eq!(r.problem.to_string(), "white: <A>^3\nblack: <A>^3\n");
    }

    #[test]
    fn two_regular_matching() {
        let p = parse_problem("white: M O | P P\nblack: M [PO] | O O").unwrap();
        let r = speedup(&p).unwrap();
        assert_eq!(r.problem.alphabet().len(), 4);
        assert_eq!(r.problem.constraint_text(crate::problem::Side::Active), "<M,O> <O> | <M> <O,P>");
    }
}
