//! Exhaustive solvability checks for tiny problems.

use std::collections::BTreeSet;

use super::SimError;
use crate::labels::Word;
use crate::problem::Problem;

/// Largest alphabet handled by [`brute_force_zero_round`].
pub const BRUTE_LABELS: usize = 4;
/// Largest degree handled by [`brute_force_zero_round`].
pub const BRUTE_DEGREE: usize = 5;

fn sorted(v: &[usize]) -> Word {
    Word::new(v.to_vec())
}

/// Every tuple over `0..n` of length `k`.
fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

/// Zero-round solvability for the active side by brute force.
///
/// Every active node runs the same algorithm, so it writes one fixed
/// labeling of its ports. A passive node may meet any port of any
/// neighbor on each of its own ports, so the algorithm works iff every
/// way of picking one entry of that labeling per passive port yields a
/// passive word.
pub fn brute_force_zero_round(p: &Problem) -> Result<bool, SimError> {
    let n = p.alphabet().len();
    let (da, dp) = (p.active().degree(), p.passive().degree());
    if n > BRUTE_LABELS || da > BRUTE_DEGREE || dp > BRUTE_DEGREE {
        return Err(SimError::OutOfRange { labels: n, degree: da.max(dp) });
    }
    let active: BTreeSet<Word> = p.active().expand();
    let passive: BTreeSet<Word> = p.passive().expand();
    let picks = tuples(da, dp);
    Ok(tuples(n, da).into_iter().filter(|out| active.contains(&sorted(out))).any(|out| {
        picks.iter().all(|pick| {
            let seen: Vec<usize> = pick.iter().map(|&port| out[port]).collect();
            passive.contains(&sorted(&seen))
        })
    }))
}

/// Whether some one-round active algorithm solves `p` on the infinite
/// tree, for active and passive degree at most 2 and at most 3 labels.
///
/// After one round an active node knows, for each of its ports, the port
/// number on the passive side; those tuples are the catalog of views. An
/// algorithm maps each view to a labeling of its ports. On the tree,
/// passive port `j` can face any view with `j` in some position, and the
/// ports face independent neighbors.
pub fn one_round_active_solvable(p: &Problem) -> Result<bool, SimError> {
    let n = p.alphabet().len();
    let (da, dp) = (p.active().degree(), p.passive().degree());
    if n > 3 || da > 2 || dp > 2 {
        return Err(SimError::OutOfRange { labels: n, degree: da.max(dp) });
    }
    let active: BTreeSet<Word> = p.active().expand();
    let passive: BTreeSet<Word> = p.passive().expand();
    let views = tuples(dp, da);
    let outputs: Vec<Vec<usize>> = tuples(n, da).into_iter().filter(|o| active.contains(&sorted(o))).collect();
    if outputs.is_empty() {
        return Ok(false);
    }
    // every assignment of an output to each view
    for choice in tuples(outputs.len(), views.len()) {
        let mut at_port = vec![BTreeSet::new(); dp];
        for (v, view) in views.iter().enumerate() {
            for (port, &j) in view.iter().enumerate() {
                at_port[j].insert(outputs[choice[v]][port]);
            }
        }
        let sets: Vec<Vec<usize>> = at_port.into_iter().map(|s| s.into_iter().collect()).collect();
        let all_good = tuples_over(&sets).iter().all(|w| passive.contains(&sorted(w)));
        if all_good {
            return Ok(true);
        }
    }
    Ok(false)
}

fn tuples_over(sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for s in sets {
        out = out
            .into_iter()
            .flat_map(|t| {
                s.iter().map(move |&x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}
