//! Questions asked of constraints and problems: universal and existential
//! goodness of slot families, relaxations and zero-round solvability.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{Configuration, Constraint, Problem, Side};
use crate::labels::{LabelId, LabelSet, Word};
use crate::transport;

/// Checks that every word obtained by picking one label per slot of
/// `family` is feasible in `constraint`. On failure returns one such word
/// that is not.
pub fn universal(family: &[LabelSet], constraint: &Constraint) -> Result<(), Word> {
    let first_choice = |slots: &[LabelSet]| -> Vec<LabelId> { slots.iter().filter_map(|s| s.iter().next()).collect() };
    if family.iter().any(|s| s.is_empty()) {
        return Ok(());
    }
    if family.len() != constraint.degree() {
        return Err(Word::new(first_choice(family)));
    }
    let mut frontier: HashSet<Word> = HashSet::new();
    frontier.insert(Word::default());
    for (k, slot) in family.iter().enumerate() {
        let mut next = HashSet::with_capacity(frontier.len() * slot.len());
        for prefix in &frontier {
            for x in slot.iter() {
                let w = prefix.plus(x);
                if next.contains(&w) {
                    continue;
                }
                if !constraint.extendable(&w) {
                    let mut ids = w.ids().to_vec();
                    ids.extend(first_choice(&family[k + 1..]));
                    return Err(Word::new(ids));
                }
                next.insert(w);
            }
        }
        frontier = next;
    }
    Ok(())
}

/// Finds a word with one label from each slot of `family` that is feasible
/// in `constraint`.
pub fn existential_fit(family: &[LabelSet], constraint: &Constraint) -> Option<Word> {
    if family.len() != constraint.degree() {
        return None;
    }
    let mut kinds: Vec<(LabelSet, u32)> = Vec::new();
    for &s in family {
        match kinds.iter_mut().find(|(k, _)| *k == s) {
            Some((_, c)) => *c += 1,
            None => kinds.push((s, 1)),
        }
    }
    let supply: Vec<u32> = kinds.iter().map(|&(_, c)| c).collect();
    for config in constraint.configs() {
        let groups = config.groups();
        let capacity: Vec<u32> = groups.iter().map(|g| g.exp).collect();
        let flow = transport::route(&supply, &capacity, |i, j| kinds[i].0.intersects(groups[j].members));
        if let Some(flow) = flow {
            let mut ids = Vec::with_capacity(family.len());
            for (i, row) in flow.iter().enumerate() {
                for (j, &units) in row.iter().enumerate().filter(|(_, &u)| u > 0) {
                    let pick = kinds[i].0.intersection(groups[j].members).iter().next().unwrap();
                    ids.extend(std::iter::repeat_n(pick, units as usize));
                }
            }
            return Some(Word::new(ids));
        }
    }
    None
}

/// For every label `x`, the set of labels at least as strong as `x` in
/// `constraint`: `y` qualifies when replacing any one occurrence of `x` by
/// `y` in a feasible word keeps it feasible. Reflexive.
pub fn strength_successors(constraint: &Constraint, alphabet_len: usize) -> Vec<LabelSet> {
    let mut out = vec![LabelSet::EMPTY; alphabet_len];
    for (x, succ) in out.iter_mut().enumerate() {
        for y in 0..alphabet_len {
            if x == y || at_least_as_strong(constraint, x, y) {
                succ.insert(y);
            }
        }
    }
    out
}

fn at_least_as_strong(constraint: &Constraint, x: LabelId, y: LabelId) -> bool {
    for config in constraint.configs() {
        let slots = config.slots();
        let mut tried = HashSet::new();
        for (k, s) in slots.iter().enumerate() {
            if !s.contains(x) || !tried.insert(*s) {
                continue;
            }
            let mut family = slots.clone();
            family[k] = LabelSet::singleton(y);
            if universal(&family, constraint).is_err() {
                return false;
            }
        }
    }
    true
}

/// A strict relaxation failure: the image of a configuration of `from` on
/// `side` contains a word that `to` does not allow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelaxationViolation {
    pub side: Side,
    pub config: Configuration,
    /// Offending word in the target alphabet.
    pub image: Word,
}

/// Checks that `f` maps every feasible word of `from` (on both sides) to a
/// feasible word of `to`.
pub fn relaxation_check(from: &Problem, to: &Problem, f: &[LabelId]) -> Result<(), RelaxationViolation> {
    for side in [Side::Active, Side::Passive] {
        check_side_strict(from, to, f, side)?;
    }
    Ok(())
}

fn check_side_strict(from: &Problem, to: &Problem, f: &[LabelId], side: Side) -> Result<(), RelaxationViolation> {
    let target = to.side(side);
    for config in from.side(side).configs() {
        let image: Vec<LabelSet> = config.slots().iter().map(|s| s.map(f)).collect();
        if let Err(word) = universal(&image, target) {
            return Err(RelaxationViolation { side, config: config.clone(), image: word });
        }
    }
    Ok(())
}

/// One active word of the source, the word it is raised to along the
/// passive strength order, and the image of that word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActiveUpgrade {
    pub word: Word,
    pub upgraded: Word,
    pub image: Word,
}

/// A passive configuration of the source and its image under the map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PassiveImage {
    pub config: Configuration,
    pub image: Configuration,
}

/// Evidence that a label map, combined with upgrades, turns solutions of
/// one problem into solutions of another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelaxationTranscript {
    pub map: Vec<LabelId>,
    pub active: Vec<ActiveUpgrade>,
    pub passive: Vec<PassiveImage>,
}

/// Upper limit on the number of active words enumerated by
/// [`upgrading_relaxation`].
pub const UPGRADE_WORD_LIMIT: usize = 200_000;

/// Relaxation with upgrades: each active node may first raise any of its
/// labels to a label at least as strong in the source's passive constraint
/// and then apply `f`. Passive configurations must map strictly. Returns
/// `None` when some active word has no valid upgrade, a passive
/// configuration maps outside the target, or the active side has more than
/// [`UPGRADE_WORD_LIMIT`] words.
pub fn upgrading_relaxation(from: &Problem, to: &Problem, f: &[LabelId]) -> Option<RelaxationTranscript> {
    if from.active().degree() != to.active().degree() || from.passive().degree() != to.passive().degree() {
        return None;
    }
    let succ = strength_successors(from.passive(), from.alphabet().len());
    let words = active_words(from)?;
    upgrading_relaxation_prepared(from, to, f, &succ, &words)
}

/// Distinct expanded active words, or `None` above [`UPGRADE_WORD_LIMIT`].
pub(crate) fn active_words(p: &Problem) -> Option<Vec<Word>> {
    let mut words: Vec<Word> = Vec::new();
    let mut seen = HashSet::new();
    for config in p.active().configs() {
        for w in config.expand() {
            if seen.insert(w.clone()) {
                words.push(w);
                if words.len() > UPGRADE_WORD_LIMIT {
                    return None;
                }
            }
        }
    }
    Some(words)
}

/// [`upgrading_relaxation`] with the strength order and the active words
/// of `from` computed by the caller.
pub(crate) fn upgrading_relaxation_prepared(
    from: &Problem,
    to: &Problem,
    f: &[LabelId],
    succ: &[LabelSet],
    words: &[Word],
) -> Option<RelaxationTranscript> {
    let mut active = Vec::with_capacity(words.len());
    for w in words {
        active.push(upgrade_word(w, succ, f, to.active())?);
    }
    check_side_strict(from, to, f, Side::Passive).ok()?;
    let passive = from
        .passive()
        .configs()
        .iter()
        .map(|c| PassiveImage { config: c.clone(), image: c.map(f) })
        .collect();
    Some(RelaxationTranscript { map: f.to_vec(), active, passive })
}

/// Finds an upgrade of `word` whose image is feasible in `target`,
/// preferring to keep labels unchanged.
pub(crate) fn upgrade_word(word: &Word, succ: &[LabelSet], f: &[LabelId], target: &Constraint) -> Option<ActiveUpgrade> {
    let counts = word.counts();
    let supply: Vec<u32> = counts.iter().map(|&(_, c)| c).collect();
    // choose y >= x whose image lies in the target group, x itself first
    let pick = |x: LabelId, g: LabelSet| -> Option<LabelId> {
        if g.contains(f[x]) {
            return Some(x);
        }
        succ[x].iter().find(|&y| g.contains(f[y]))
    };
    for config in target.configs() {
        let groups = config.groups();
        let capacity: Vec<u32> = groups.iter().map(|g| g.exp).collect();
        let flow = transport::route(&supply, &capacity, |i, j| pick(counts[i].0, groups[j].members).is_some());
        if let Some(flow) = flow {
            let mut up = Vec::with_capacity(word.len());
            for (i, row) in flow.iter().enumerate() {
                for (j, &units) in row.iter().enumerate().filter(|(_, &u)| u > 0) {
                    let y = pick(counts[i].0, groups[j].members).unwrap();
                    up.extend(std::iter::repeat_n(y, units as usize));
                }
            }
            let upgraded = Word::new(up);
            let image = upgraded.map(f);
            return Some(ActiveUpgrade { word: word.clone(), upgraded, image });
        }
    }
    None
}

/// For one candidate support of an output word, a multiset over that
/// support that the opposite constraint rejects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refutation {
    pub support: LabelSet,
    pub bad: Word,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroRoundReport {
    pub solvable: bool,
    /// An output word every opposite node accepts regardless of how the
    /// labels are combined, when one exists.
    pub witness: Option<Word>,
    /// When unsolvable: one refutation per candidate support. Every output
    /// word's support contains one of these supports.
    pub refutations: Vec<Refutation>,
}

/// Name-level view of a [`ZeroRoundReport`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroRoundJson {
    pub side: Side,
    pub solvable: bool,
    pub witness: Option<Vec<String>>,
    pub refutations: Vec<RefutationJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefutationJson {
    pub support: Vec<String>,
    pub bad: Vec<String>,
}

impl ZeroRoundReport {
    pub fn to_json(&self, p: &Problem, side: Side) -> ZeroRoundJson {
        ZeroRoundJson {
            side,
            solvable: self.solvable,
            witness: self.witness.as_ref().map(|w| p.word_names(w)),
            refutations: self
                .refutations
                .iter()
                .map(|r| RefutationJson { support: p.set_names(r.support), bad: p.word_names(&r.bad) })
                .collect(),
        }
    }
}

/// Decides whether the problem is solvable in zero rounds by nodes of
/// `side`: some word `w` of that side exists such that every multiset of
/// the other side's degree drawn from the labels of `w` is feasible on the
/// other side. Every node outputs a permutation of `w`, and the adversary
/// may wire each edge of an opposite node to any port.
pub fn zero_round_solvable(p: &Problem, side: Side) -> ZeroRoundReport {
    let outputs = p.side(side);
    let checker = p.side(side.other());
    let cdeg = checker.degree();
    let mut refutations = Vec::new();
    let mut tried: HashSet<LabelSet> = HashSet::new();
    for config in outputs.configs() {
        let groups: Vec<LabelSet> = config.groups().iter().map(|g| g.members).collect();
        let mut candidates = Vec::new();
        hitting_sets(&groups, LabelSet::EMPTY, &mut candidates);
        for support in candidates {
            if !tried.insert(support) {
                continue;
            }
            match universal(&vec![support; cdeg], checker) {
                Ok(()) => {
                    let witness = witness_word(config, support);
                    return ZeroRoundReport { solvable: true, witness: Some(witness), refutations: Vec::new() };
                }
                Err(bad) => refutations.push(Refutation { support, bad }),
            }
        }
    }
    ZeroRoundReport { solvable: false, witness: None, refutations }
}

/// Label sets built by repeatedly choosing a member of the first group not
/// yet hit. Every word of the configuration has a support containing one
/// of them.
fn hitting_sets(groups: &[LabelSet], cur: LabelSet, out: &mut Vec<LabelSet>) {
    match groups.iter().find(|g| !g.intersects(cur)) {
        None => out.push(cur),
        Some(g) => {
            for x in g.iter() {
                hitting_sets(groups, cur.with(x), out);
            }
        }
    }
}

fn witness_word(config: &Configuration, support: LabelSet) -> Word {
    let mut ids = Vec::with_capacity(config.degree());
    for g in config.groups() {
        let x = g.members.intersection(support).iter().next().expect("support hits every group");
        ids.extend(std::iter::repeat_n(x, g.exp as usize));
    }
    Word::new(ids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::parse_problem;

    #[test]
    fn universal_reports_counterexample() {
        let p = parse_problem("white: M O O | P P P\nblack: M [PO] [PO] | O O O").unwrap();
        let m = p.label_id("M").unwrap();
        let o = p.label_id("O").unwrap();
        let po: LabelSet = [p.label_id("P").unwrap(), o].into_iter().collect();
        assert!(universal(&[LabelSet::singleton(m), po, po], p.passive()).is_ok());
        let bad = universal(&[po, po, po], p.passive()).unwrap_err();
        assert!(!p.passive().member(&bad).unwrap());
    }

    #[test]
    fn existential_finds_a_member() {
        let p = parse_problem("white: M O O | P P P\nblack: M [PO] [PO] | O O O").unwrap();
        let all = LabelSet::full(3);
        let w = existential_fit(&[all, all, all], p.passive()).unwrap();
        assert!(p.passive().member(&w).unwrap());
        let m = LabelSet::singleton(p.label_id("M").unwrap());
        assert!(existential_fit(&[m, m, all], p.passive()).is_none());
    }

    #[test]
    fn strength_order_of_matching_passive_side() {
        // in M [PO]^2 | O^3 the label O is at least as strong as P
        let p = parse_problem("white: M O O | P P P\nblack: M [PO] [PO] | O O O").unwrap();
        let [m, o, pp] = ["M", "O", "P"].map(|n| p.label_id(n).unwrap());
        let succ = strength_successors(p.passive(), 3);
        assert!(succ[pp].contains(o));
        assert!(!succ[o].contains(pp));
        assert_eq!(succ[m], LabelSet::singleton(m));
    }

    #[test]
    fn identity_is_a_relaxation() {
        let p = parse_problem("white: M O O | P P P\nblack: M [PO] [PO] | O O O").unwrap();
        let id: Vec<usize> = (0..3).collect();
        assert!(relaxation_check(&p, &p, &id).is_ok());
        assert!(upgrading_relaxation(&p, &p, &id).is_some());
    }

    #[test]
    fn matching_is_not_zero_round_solvable() {
        let p = parse_problem("white: M O O | P P P\nblack: M [PO] [PO] | O O O").unwrap();
        let r = zero_round_solvable(&p, Side::Active);
        assert!(!r.solvable);
        for rf in &r.refutations {
            assert!(rf.bad.support().is_subset(rf.support));
            assert!(!p.passive().member(&rf.bad).unwrap());
        }
    }

    #[test]
    fn trivial_problem_is_zero_round_solvable() {
        let p = parse_problem("white: A A | B B\nblack: [AB] [AB]").unwrap();
        let r = zero_round_solvable(&p, Side::Active);
        assert!(r.solvable);
        assert_eq!(r.witness.unwrap().len(), 2);
    }
}
