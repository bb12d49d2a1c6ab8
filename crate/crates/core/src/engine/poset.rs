//! Strength order on labels.

use serde::Serialize;

use crate::labels::{LabelId, LabelSet};
use crate::problem::{strength_successors, Constraint, Problem, Side};

/// Substitutability preorder of one constraint. `x <= y` when `y` may
/// replace `x` in every feasible word containing `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelPoset {
    succ: Vec<LabelSet>,
}

impl LabelPoset {
    pub fn of_constraint(constraint: &Constraint, alphabet_len: usize) -> Self {
        LabelPoset { succ: strength_successors(constraint, alphabet_len) }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn leq(&self, x: LabelId, y: LabelId) -> bool {
        self.succ[x].contains(y)
    }

    /// Labels at least as strong as `x`, `x` included.
    pub fn successors(&self, x: LabelId) -> LabelSet {
        self.succ[x]
    }

    /// Equivalence classes (`x <= y` and `y <= x`), ordered by smallest
    /// member.
    pub fn classes(&self) -> Vec<LabelSet> {
        let mut out: Vec<LabelSet> = Vec::new();
        for x in 0..self.len() {
            if out.iter().any(|c| c.contains(x)) {
                continue;
            }
            out.push((0..self.len()).filter(|&y| self.leq(x, y) && self.leq(y, x)).collect());
        }
        out
    }

    /// Upward closure of a set.
    pub fn closure(&self, set: LabelSet) -> LabelSet {
        set.iter().fold(set, |acc, x| acc.union(self.succ[x]))
    }

    pub fn is_right_closed(&self, set: LabelSet) -> bool {
        self.closure(set) == set
    }

    /// Covering pairs between equivalence classes, as `(lower, upper)`
    /// class representatives.
    pub fn hasse_edges(&self) -> Vec<(LabelId, LabelId)> {
        let classes = self.classes();
        let reps: Vec<LabelId> = classes.iter().map(|c| c.iter().next().unwrap()).collect();
        let lt = |a: usize, b: usize| a != b && self.leq(reps[a], reps[b]);
        let mut edges = Vec::new();
        for a in 0..reps.len() {
            for b in 0..reps.len() {
                if lt(a, b) && !(0..reps.len()).any(|c| lt(a, c) && lt(c, b)) {
                    edges.push((reps[a], reps[b]));
                }
            }
        }
        edges
    }

    /// True when the relation is reflexive and transitive.
    pub fn is_preorder(&self) -> bool {
        (0..self.len()).all(|x| self.leq(x, x))
            && (0..self.len()).all(|x| self.succ[x].iter().all(|y| self.succ[y].is_subset(self.succ[x])))
    }

    /// All nonempty right-closed sets, largest first.
    pub fn right_closed_sets(&self) -> Vec<LabelSet> {
        let mut classes = self.classes();
        // a class strictly above another has strictly fewer successors, so
        // this puts every class after all classes above it
        classes.sort_by_key(|c| self.succ[c.iter().next().unwrap()].len());
        let mut out = Vec::new();
        self.collect_closed(&classes, 0, LabelSet::EMPTY, &mut out);
        out.retain(|s| !s.is_empty());
        out.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        out
    }

    fn collect_closed(&self, classes: &[LabelSet], k: usize, cur: LabelSet, out: &mut Vec<LabelSet>) {
        if k == classes.len() {
            out.push(cur);
            return;
        }
        self.collect_closed(classes, k + 1, cur, out);
        let class = classes[k];
        let rep = class.iter().next().unwrap();
        if self.succ[rep].is_subset(cur.union(class)) {
            self.collect_closed(classes, k + 1, cur.union(class), out);
        }
    }
}

/// Strength order of one side of a problem.
pub fn strength_order(p: &Problem, side: Side) -> LabelPoset {
    LabelPoset::of_constraint(p.side(side), p.alphabet().len())
}

/// Name-level view of a poset for reports.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PosetReport {
    pub labels: Vec<String>,
    /// `leq[x][y]`: `y` may replace `x`.
    pub leq: Vec<Vec<bool>>,
    pub classes: Vec<Vec<String>>,
    /// Covering relations between class representatives, lower first.
    pub hasse: Vec<(String, String)>,
}

impl PosetReport {
    pub fn new(p: &Problem, poset: &LabelPoset) -> Self {
        let n = poset.len();
        PosetReport {
            labels: p.alphabet().to_vec(),
            leq: (0..n).map(|x| (0..n).map(|y| poset.leq(x, y)).collect()).collect(),
            classes: poset.classes().into_iter().map(|c| p.set_names(c)).collect(),
            hasse: poset
                .hasse_edges()
                .into_iter()
                .map(|(a, b)| (p.label_name(a).to_string(), p.label_name(b).to_string()))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::parse_problem;

    #[test]
    fn right_closed_sets_of_a_chain() {
        // passive M P | M O | O O: P < O, M alone
        let p = parse_problem("white: M O | P P\nblack: M [PO] | O O").unwrap();
        let poset = strength_order(&p, Side::Passive);
        let names: Vec<Vec<String>> = poset.right_closed_sets().into_iter().map(|s| p.set_names(s)).collect();
        assert_eq!(names.len(), 5);
        assert!(names.contains(&vec!["O".to_string(), "P".to_string()]));
        assert!(!names.contains(&vec!["P".to_string()]));
        assert!(poset.is_preorder());
    }

    #[test]
    fn hasse_of_chain() {
        let p = parse_problem("white: M O | P P\nblack: M [PO] | O O").unwrap();
        let poset = strength_order(&p, Side::Passive);
        let [o, pp] = ["O", "P"].map(|n| p.label_id(n).unwrap());
        assert_eq!(poset.hasse_edges(), vec![(pp, o)]);
    }
}
