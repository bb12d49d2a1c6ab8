//! Checkers for labelings and edge sets.

use serde::Serialize;

use super::graph::PortGraph;
use super::SimError;
use crate::labels::Word;
use crate::problem::{Problem, Side};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SideReport {
    pub checked: usize,
    pub failed: Vec<usize>,
    /// Nodes whose degree differs from the constraint degree.
    pub wrong_degree: Vec<usize>,
    pub skipped_boundary: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolutionReport {
    pub white: SideReport,
    pub black: SideReport,
    /// Edges whose label is not in the alphabet.
    pub unknown_labels: Vec<usize>,
    pub passed: bool,
}

/// Checks every node's incident labels against its constraint. Boundary
/// nodes of tree excerpts are skipped.
pub fn check_solution(p: &Problem, g: &PortGraph, labels: &[String]) -> Result<SolutionReport, SimError> {
    if labels.len() != g.edges().len() {
        return Err(SimError::LabelCount { edges: g.edges().len(), labels: labels.len() });
    }
    let ids: Vec<Option<usize>> = labels.iter().map(|l| p.label_id(l)).collect();
    let unknown_labels: Vec<usize> = (0..labels.len()).filter(|&i| ids[i].is_none()).collect();
    let side_report = |side: Side| -> SideReport {
        let constraint = p.side(side);
        let mut r = SideReport::default();
        for v in 0..g.count(side) {
            if g.is_boundary(side, v) {
                r.skipped_boundary += 1;
                continue;
            }
            let ports = g.ports(side, v);
            if ports.len() != constraint.degree() {
                r.wrong_degree.push(v);
                continue;
            }
            r.checked += 1;
            let word: Option<Vec<usize>> = ports.iter().map(|&i| ids[i]).collect();
            let ok = word.is_some_and(|w| constraint.member(&Word::new(w)).unwrap_or(false));
            if !ok {
                r.failed.push(v);
            }
        }
        r
    };
    let white = side_report(Side::Active);
    let black = side_report(Side::Passive);
    let passed = unknown_labels.is_empty()
        && [&white, &black].iter().all(|r| r.failed.is_empty() && r.wrong_degree.is_empty());
    Ok(SolutionReport { white, black, unknown_labels, passed })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KMatchingReport {
    pub k: usize,
    /// Nodes incident to more than `k` selected edges.
    pub over_k: Vec<(Side, usize)>,
    /// Unmatched nodes with an unmatched neighbor, as `(node, neighbor)`.
    pub uncovered: Vec<(Side, usize, usize)>,
    pub passed: bool,
}

/// Checks that every node has at most `k` selected edges, and that every
/// node without a selected edge only has neighbors with one.
pub fn k_matching_check(g: &PortGraph, edges: &[usize], k: usize) -> Result<KMatchingReport, SimError> {
    let mut white = vec![0usize; g.white_count()];
    let mut black = vec![0usize; g.black_count()];
    let mut seen = vec![false; g.edges().len()];
    for &i in edges {
        let e = g.edges().get(i).ok_or_else(|| SimError::InvalidGraph(format!("no edge {i}")))?;
        if std::mem::replace(&mut seen[i], true) {
            continue;
        }
        white[e.white] += 1;
        black[e.black] += 1;
    }
    let mut over_k: Vec<(Side, usize)> = Vec::new();
    over_k.extend((0..white.len()).filter(|&v| white[v] > k).map(|v| (Side::Active, v)));
    over_k.extend((0..black.len()).filter(|&v| black[v] > k).map(|v| (Side::Passive, v)));
    let mut uncovered = Vec::new();
    for e in g.edges() {
        if white[e.white] == 0 && black[e.black] == 0 {
            uncovered.push((Side::Active, e.white, e.black));
            uncovered.push((Side::Passive, e.black, e.white));
        }
    }
    let passed = over_k.is_empty() && uncovered.is_empty();
    Ok(KMatchingReport { k, over_k, uncovered, passed })
}

/// Labels a `k`-matching for the family member with `x = k - 1`, `y = 0`.
///
/// A white node with selected edges puts `M` on its first one (by port),
/// `X` on the other selected ones, then turns unselected edges into `X`
/// in port order until it has exactly `k - 1` of them, and `O` on the
/// rest. A white node without selected edges puts `X` on its first `k - 1`
/// ports and `P` on the rest.
pub fn k_matching_labeling(g: &PortGraph, edges: &[usize], k: usize) -> Result<Vec<String>, SimError> {
    if k == 0 {
        return Err(SimError::Precondition("k must be at least 1".into()));
    }
    let report = k_matching_check(g, edges, k)?;
    if !report.passed {
        return Err(SimError::Precondition(format!("edge set is not a {k}-matching")));
    }
    let mut selected = vec![false; g.edges().len()];
    for &i in edges {
        selected[i] = true;
    }
    let mut labels = vec![String::new(); g.edges().len()];
    for w in 0..g.white_count() {
        let ports = g.ports(Side::Active, w);
        let mut xs = 0;
        let matched = ports.iter().any(|&i| selected[i]);
        if matched {
            let mut first = true;
            for &i in ports {
                if selected[i] {
                    labels[i] = if std::mem::take(&mut first) { "M".into() } else { "X".into() };
                    xs += usize::from(labels[i] == "X");
                }
            }
            for &i in ports {
                if !selected[i] {
                    labels[i] = if xs < k - 1 { "X".into() } else { "O".into() };
                    xs += usize::from(labels[i] == "X");
                }
            }
        } else {
            for &i in ports {
                labels[i] = if xs < k - 1 { "X".into() } else { "P".into() };
                xs += usize::from(labels[i] == "X");
            }
        }
        if xs != k - 1 {
            return Err(SimError::Precondition(format!("white node {w} has degree below {k}")));
        }
    }
    Ok(labels)
}

/// Maps an independent set of the line graph (a set of edge indices) back
/// to an edge set; errors with a pair of edges that share an endpoint.
pub fn line_graph_mm(g: &PortGraph, mis_on_line: &[usize]) -> Result<Vec<usize>, SimError> {
    let mut white: Vec<Option<usize>> = vec![None; g.white_count()];
    let mut black: Vec<Option<usize>> = vec![None; g.black_count()];
    let mut out = Vec::with_capacity(mis_on_line.len());
    for &i in mis_on_line {
        let e = g.edges().get(i).ok_or_else(|| SimError::InvalidGraph(format!("no edge {i}")))?;
        for owner in [&mut white[e.white], &mut black[e.black]] {
            if let Some(j) = *owner {
                if j != i {
                    return Err(SimError::NotIndependent(j, i));
                }
            }
            *owner = Some(i);
        }
        out.push(i);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{make_pi, FamilyParams};
    use crate::sim::graph::Edge;

    fn path3() -> PortGraph {
        let e = |w, pw, b, pb| Edge { white: w, white_port: pw, black: b, black_port: pb };
        PortGraph::new(2, 2, vec![e(0, 1, 0, 1), e(1, 1, 0, 2), e(1, 2, 1, 1)]).unwrap()
    }

    #[test]
    fn line_graph_of_a_path() {
        let g = path3();
        for mis in [vec![0, 2], vec![1]] {
            let m = line_graph_mm(&g, &mis).unwrap();
            assert!(k_matching_check(&g, &m, 1).unwrap().passed);
        }
        assert_eq!(line_graph_mm(&g, &[0, 1]), Err(SimError::NotIndependent(0, 1)));
    }

    #[test]
    fn empty_set_is_not_a_k_matching() {
        let r = k_matching_check(&path3(), &[], 2).unwrap();
        assert!(!r.passed && r.over_k.is_empty());
    }

    #[test]
    fn all_o_fails_everywhere() {
        let g = crate::sim::gen_instance(crate::sim::InstanceKind::CompleteBipartite, 3, 0, 1).unwrap();
        let p = make_pi(FamilyParams::new(3, 0, 0).unwrap());
        let r = check_solution(&p, &g, &vec!["O".to_string(); 9]).unwrap();
        assert_eq!(r.white.failed.len(), 3);
        assert!(r.black.failed.is_empty());
    }

    #[test]
    fn empty_graph_passes() {
        let g = PortGraph::new(0, 0, vec![]).unwrap();
        let p = make_pi(FamilyParams::new(3, 0, 0).unwrap());
        assert!(check_solution(&p, &g, &[]).unwrap().passed);
    }
}
