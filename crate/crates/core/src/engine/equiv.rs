//! Renaming equivalence of problems.

use crate::labels::LabelId;
use crate::problem::{LabelMap, Problem, Side};

use super::{merge_ids, EngineError, LabelPoset};

/// Above this many labels exhaustive search is refused.
pub const EXHAUSTIVE_LABEL_LIMIT: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivalenceMode {
    /// Complete permutation search, at most [`EXHAUSTIVE_LABEL_LIMIT`]
    /// labels.
    Exhaustive,
    /// Same search with a node budget and no size limit; may miss a
    /// bijection.
    Heuristic { budget: u64 },
}

/// Finds a bijection `g` from `a`'s labels to `b`'s such that renaming `a`
/// by `g` gives `b`.
pub fn equivalent(a: &Problem, b: &Problem, mode: EquivalenceMode) -> Result<Option<LabelMap>, EngineError> {
    let n = a.alphabet().len();
    if let EquivalenceMode::Exhaustive = mode {
        if n > EXHAUSTIVE_LABEL_LIMIT {
            return Err(EngineError::ExhaustiveLimit { labels: n, limit: EXHAUSTIVE_LABEL_LIMIT });
        }
    }
    if n != b.alphabet().len()
        || a.active().degree() != b.active().degree()
        || a.passive().degree() != b.passive().degree()
        || a.active().configs().len() != b.active().configs().len()
        || a.passive().configs().len() != b.passive().configs().len()
    {
        return Ok(None);
    }
    let sa = signatures(a);
    let sb = signatures(b);
    let candidates: Vec<Vec<LabelId>> = (0..n).map(|x| (0..n).filter(|&y| sa[x] == sb[y]).collect()).collect();
    if candidates.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let budget = match mode {
        EquivalenceMode::Exhaustive => u64::MAX,
        EquivalenceMode::Heuristic { budget } => budget,
    };
    let mut order: Vec<LabelId> = (0..n).collect();
    order.sort_by_key(|&x| candidates[x].len());
    let mut search = Search { a, b, candidates: &candidates, order: &order, budget, nodes: 0 };
    let mut f = vec![usize::MAX; n];
    let mut used = vec![false; n];
    Ok(search.run(0, &mut f, &mut used).map(|f| {
        a.alphabet().iter().zip(&f).map(|(x, &y)| (x.clone(), b.alphabet()[y].clone())).collect()
    }))
}

/// Renaming-invariant description of each label.
fn signatures(p: &Problem) -> Vec<Vec<(u8, usize, u32, usize, usize)>> {
    let n = p.alphabet().len();
    let active_order = LabelPoset::of_constraint(p.active(), n);
    let passive_order = LabelPoset::of_constraint(p.passive(), n);
    (0..n)
        .map(|x| {
            let mut sig = Vec::new();
            for (tag, side) in [(0u8, Side::Active), (1u8, Side::Passive)] {
                for c in p.side(side).configs() {
                    for g in c.groups() {
                        if g.members.contains(x) {
                            sig.push((tag, g.members.len(), g.exp, c.groups().len(), 0));
                        }
                    }
                }
            }
            sig.push((2, active_order.successors(x).len(), 0, passive_order.successors(x).len(), 0));
            sig.sort_unstable();
            sig
        })
        .collect()
}

struct Search<'a> {
    a: &'a Problem,
    b: &'a Problem,
    candidates: &'a [Vec<LabelId>],
    order: &'a [LabelId],
    budget: u64,
    nodes: u64,
}

impl Search<'_> {
    fn run(&mut self, k: usize, f: &mut Vec<LabelId>, used: &mut Vec<bool>) -> Option<Vec<LabelId>> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        if k == self.order.len() {
            let renamed = merge_ids(self.a, f, self.b.alphabet().to_vec()).ok()?;
            return (renamed == *self.b || renamed.same_semantics(self.b)).then(|| f.clone());
        }
        let x = self.order[k];
        for &y in &self.candidates[x] {
            if used[y] {
                continue;
            }
            used[y] = true;
            f[x] = y;
            if let Some(found) = self.run(k + 1, f, used) {
                return Some(found);
            }
            used[y] = false;
        }
        f[x] = usize::MAX;
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::parse_problem;

    #[test]
    fn finds_renaming() {
        let a = parse_problem("white: M O O | P P P\nblack: M [PO] [PO] | O O O").unwrap();
        let b = parse_problem("white: a c c | b b b\nblack: a [bc] [bc] | c c c").unwrap();
        let g = equivalent(&a, &b, EquivalenceMode::Exhaustive).unwrap().unwrap();
        assert_eq!(g["M"], "a");
        assert_eq!(g["O"], "c");
        assert_eq!(g["P"], "b");
    }

    #[test]
    fn size_mismatch_is_absent() {
        let a = parse_problem("white: A A\nblack: A A").unwrap();
        let b = parse_problem("white: A B\nblack: [AB] [AB]").unwrap();
        assert_eq!(equivalent(&a, &b, EquivalenceMode::Exhaustive).unwrap(), None);
    }
}
