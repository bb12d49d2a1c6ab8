//! Search for a label map relaxing one problem into another.

use std::collections::HashSet;

use crate::labels::{LabelId, LabelSet, Word};
use crate::problem::{
    active_words, relaxation_check, strength_successors, universal, upgrade_word, upgrading_relaxation_prepared,
    ActiveUpgrade, PassiveImage, Problem, RelaxationTranscript, UPGRADE_WORD_LIMIT,
};

use super::EngineError;

/// Default number of search nodes before giving up.
pub const DEFAULT_SEARCH_BUDGET: u64 = 5_000_000;

#[derive(Clone, Copy, Debug)]
pub struct RelaxationSearch {
    pub budget: u64,
    /// Let active words be raised along the source's passive strength
    /// order before mapping (see [`upgrading_relaxation`]).
    pub upgrades: bool,
}

impl Default for RelaxationSearch {
    fn default() -> Self {
        RelaxationSearch { budget: DEFAULT_SEARCH_BUDGET, upgrades: true }
    }
}

/// Backtracking search over label maps from `from` to `to`. A partial map
/// is cut as soon as some configuration restricted to the labels mapped so
/// far has a choice word whose image lands outside the target, or (with
/// upgrades) an active word whose labels and their stronger labels are all
/// mapped has no valid upgrade. Returns the first map found together with
/// its transcript, or `None` after the whole space is exhausted.
pub fn find_relaxation_mapping(
    from: &Problem,
    to: &Problem,
    opts: &RelaxationSearch,
) -> Result<Option<RelaxationTranscript>, EngineError> {
    if from.active().degree() != to.active().degree() || from.passive().degree() != to.passive().degree() {
        return Ok(None);
    }
    let n = from.alphabet().len();
    let m = to.alphabet().len();
    let passive_support = from.passive().support();
    let active_support = from.active().support();
    let to_passive = to.passive().support();
    let to_active = to.active().support();

    let mut candidates: Vec<Vec<LabelId>> = Vec::with_capacity(n);
    for a in 0..n {
        let mut c: Vec<LabelId> = (0..m)
            .filter(|&b| {
                (!passive_support.contains(a) || to_passive.contains(b))
                    && (opts.upgrades || !active_support.contains(a) || to_active.contains(b))
            })
            .collect();
        // try a target label of the same name first
        if let Some(same) = to.label_id(from.label_name(a)) {
            if let Some(pos) = c.iter().position(|&b| b == same) {
                c.remove(pos);
                c.insert(0, same);
            }
        }
        if c.is_empty() {
            return Ok(None);
        }
        candidates.push(c);
    }

    let mut order: Vec<LabelId> = (0..n).collect();
    let weight = |a: LabelId| -> usize {
        from.passive().configs().iter().filter(|c| c.support().contains(a)).count()
            + from.active().configs().iter().filter(|c| c.support().contains(a)).count()
    };
    order.sort_by_key(|&a| (std::cmp::Reverse(weight(a)), candidates[a].len()));

    let (succ, words) = if opts.upgrades {
        let Some(words) = active_words(from) else { return Ok(None) };
        (strength_successors(from.passive(), n), words)
    } else {
        (Vec::new(), Vec::new())
    };
    // the labels an active word's upgrades may use
    let reach: Vec<LabelSet> = words
        .iter()
        .map(|w| w.support().iter().fold(LabelSet::EMPTY, |acc, x| acc.union(succ[x])))
        .collect();
    let mut search = Search {
        from,
        to,
        opts,
        candidates: &candidates,
        order: &order,
        succ: &succ,
        words: &words,
        reach: &reach,
        nodes: 0,
    };
    let mut f = vec![0; n];
    search.run(0, LabelSet::EMPTY, &mut f)
}

struct Search<'a> {
    from: &'a Problem,
    to: &'a Problem,
    opts: &'a RelaxationSearch,
    candidates: &'a [Vec<LabelId>],
    order: &'a [LabelId],
    succ: &'a [LabelSet],
    words: &'a [Word],
    reach: &'a [LabelSet],
    nodes: u64,
}

impl Search<'_> {
    fn run(&mut self, k: usize, assigned: LabelSet, f: &mut [LabelId]) -> Result<Option<RelaxationTranscript>, EngineError> {
        self.nodes += 1;
        if self.nodes > self.opts.budget {
            return Err(EngineError::BudgetExceeded(self.opts.budget));
        }
        if k == self.order.len() {
            return Ok(self.finish(f));
        }
        let a = self.order[k];
        let assigned = assigned.with(a);
        for &b in &self.candidates[a] {
            f[a] = b;
            if self.partial_ok(a, assigned, f) {
                if let Some(t) = self.run(k + 1, assigned, f)? {
                    return Ok(Some(t));
                }
            }
        }
        Ok(None)
    }

    fn partial_ok(&self, a: LabelId, assigned: LabelSet, f: &[LabelId]) -> bool {
        let mut sides = vec![(self.from.passive(), self.to.passive())];
        if !self.opts.upgrades {
            sides.push((self.from.active(), self.to.active()));
        }
        for (src, dst) in sides {
            for c in src.configs() {
                if !c.support().contains(a) {
                    continue;
                }
                let restricted: Vec<LabelSet> = c.slots().iter().map(|s| s.intersection(assigned)).collect();
                if restricted.iter().any(|s| s.is_empty()) {
                    continue;
                }
                let image: Vec<LabelSet> = restricted.iter().map(|s| s.map(f)).collect();
                if universal(&image, dst).is_err() {
                    return false;
                }
            }
        }
        if self.opts.upgrades {
            for (w, reach) in self.words.iter().zip(self.reach) {
                if reach.contains(a) && reach.is_subset(assigned) && upgrade_word(w, self.succ, f, self.to.active()).is_none() {
                    return false;
                }
            }
        }
        true
    }

    fn finish(&self, f: &[LabelId]) -> Option<RelaxationTranscript> {
        if self.opts.upgrades {
            return upgrading_relaxation_prepared(self.from, self.to, f, self.succ, self.words);
        }
        relaxation_check(self.from, self.to, f).ok()?;
        strict_transcript(self.from, f)
    }
}

/// Transcript of a strict relaxation: every active word is kept as is.
pub(crate) fn strict_transcript(from: &Problem, f: &[LabelId]) -> Option<RelaxationTranscript> {
    let mut seen = HashSet::new();
    let mut active = Vec::new();
    for c in from.active().configs() {
        for w in c.expand() {
            if seen.insert(w.clone()) {
                if seen.len() > UPGRADE_WORD_LIMIT {
                    return None;
                }
                let image = w.map(f);
                active.push(ActiveUpgrade { upgraded: w.clone(), word: w, image });
            }
        }
    }
    let passive = from
        .passive()
        .configs()
        .iter()
        .map(|c| PassiveImage { config: c.clone(), image: c.map(f) })
        .collect();
    Some(RelaxationTranscript { map: f.to_vec(), active, passive })
}
