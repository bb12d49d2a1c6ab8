//! Bipartite transportation feasibility.
//!
//! Supplies on the left must be routed completely to capacitated slots on
//! the right along allowed edges. This is the system-of-distinct-slots test
//! behind membership, existential matching and upgrade checks: a word fits a
//! condensed configuration iff every occurrence can be placed in a distinct
//! slot whose group admits it.

/// Routes all of `supply` into `capacity`. Returns the flow matrix
/// `flow[i][j]` on success.
pub fn route(
    supply: &[u32],
    capacity: &[u32],
    allowed: impl Fn(usize, usize) -> bool,
) -> Option<Vec<Vec<u32>>> {
    let total: u32 = supply.iter().sum();
    if total > capacity.iter().sum() {
        return None;
    }
    let n = supply.len();
    let m = capacity.len();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..m).filter(|&j| allowed(i, j)).collect())
        .collect();
    let mut flow = vec![vec![0u32; m]; n];
    let mut load = vec![0u32; m];

    for i in 0..n {
        for _ in 0..supply[i] {
            let mut seen_left = vec![false; n];
            let mut seen_right = vec![false; m];
            if !augment(i, &adj, capacity, &mut flow, &mut load, &mut seen_left, &mut seen_right) {
                return None;
            }
        }
    }
    Some(flow)
}

/// Depth-first search for one augmenting unit from left node `i`.
fn augment(
    i: usize,
    adj: &[Vec<usize>],
    capacity: &[u32],
    flow: &mut [Vec<u32>],
    load: &mut [u32],
    seen_left: &mut [bool],
    seen_right: &mut [bool],
) -> bool {
    seen_left[i] = true;
    for &j in &adj[i] {
        if seen_right[j] {
            continue;
        }
        seen_right[j] = true;
        if load[j] < capacity[j] {
            load[j] += 1;
            flow[i][j] += 1;
            return true;
        }
        // slot full: try to move some other unit out of it
        for k in 0..flow.len() {
            if flow[k][j] > 0 && !seen_left[k] && augment(k, adj, capacity, flow, load, seen_left, seen_right) {
                flow[k][j] -= 1;
                flow[i][j] += 1;
                return true;
            }
        }
    }
    false
}

/// Feasibility only.
pub fn feasible(supply: &[u32], capacity: &[u32], allowed: impl Fn(usize, usize) -> bool) -> bool {
    route(supply, capacity, allowed).is_some()
}
