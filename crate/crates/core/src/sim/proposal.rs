//! The proposal algorithm and the matching encoding over `{M, O, P}`.

use serde::Serialize;

use super::graph::PortGraph;
use super::SimError;
use crate::problem::Side;

/// Matched port per node, 1-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MatchingState {
    pub white: Vec<Option<usize>>,
    pub black: Vec<Option<usize>>,
}

impl MatchingState {
    pub fn empty(g: &PortGraph) -> Self {
        MatchingState { white: vec![None; g.white_count()], black: vec![None; g.black_count()] }
    }

    /// Builds the state of a set of edges; errors if two share a node.
    pub fn from_edges(g: &PortGraph, edges: &[usize]) -> Result<Self, SimError> {
        let mut m = MatchingState::empty(g);
        for &i in edges {
            let e = g.edges().get(i).ok_or_else(|| SimError::InvalidGraph(format!("no edge {i}")))?;
            if m.white[e.white].is_some() || m.black[e.black].is_some() {
                return Err(SimError::NotAMatching(i));
            }
            m.white[e.white] = Some(e.white_port);
            m.black[e.black] = Some(e.black_port);
        }
        Ok(m)
    }

    /// Indices of matched edges, with the symmetry of both endpoints
    /// checked.
    pub fn edges(&self, g: &PortGraph) -> Result<Vec<usize>, SimError> {
        let mut out = Vec::new();
        for (w, port) in self.white.iter().enumerate() {
            let Some(p) = *port else { continue };
            let &i = g.ports(Side::Active, w).get(p - 1).ok_or(SimError::Asymmetric(w))?;
            let e = g.edges()[i];
            if self.black.get(e.black).copied().flatten() != Some(e.black_port) {
                return Err(SimError::Asymmetric(w));
            }
            out.push(i);
        }
        let black_matched = self.black.iter().filter(|p| p.is_some()).count();
        if black_matched != out.len() {
            return Err(SimError::Asymmetric(usize::MAX));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProposalRun {
    pub matching: MatchingState,
    /// Proposal iterations in which some white node proposed.
    pub iterations: usize,
    /// Communication rounds when one iteration takes a proposal round and
    /// an answer round.
    pub rounds_two_phase: usize,
}

/// In iteration `i`, every unmatched white node proposes on port `i`;
/// each unmatched black node accepts the proposal arriving on its smallest
/// port. All proposals of an iteration are delivered before any answer.
pub fn run_proposal(g: &PortGraph) -> ProposalRun {
    let mut m = MatchingState::empty(g);
    let mut iterations = 0;
    for i in 1..=g.max_degree(Side::Active) {
        // black node -> (arrival port, white node, white port)
        let mut best: Vec<Option<(usize, usize)>> = vec![None; g.black_count()];
        let mut any = false;
        for w in 0..g.white_count() {
            if m.white[w].is_some() || g.degree(Side::Active, w) < i {
                continue;
            }
            any = true;
            let e = g.edges()[g.ports(Side::Active, w)[i - 1]];
            if m.black[e.black].is_none() && best[e.black].is_none_or(|(p, _)| e.black_port < p) {
                best[e.black] = Some((e.black_port, w));
            }
        }
        if !any {
            break;
        }
        iterations = i;
        for (b, choice) in best.into_iter().enumerate() {
            if let Some((port, w)) = choice {
                m.black[b] = Some(port);
                m.white[w] = Some(i);
            }
        }
    }
    tracing::trace!(iterations, "proposal run finished");
    ProposalRun { matching: m, iterations, rounds_two_phase: 2 * iterations }
}

/// Edge labels in the encoding over `{M, O, P}`: a matched white node puts
/// `M` on its matched edge and `O` elsewhere, an unmatched one puts `P`
/// everywhere.
pub fn mm_labeling(g: &PortGraph, m: &MatchingState) -> Result<Vec<String>, SimError> {
    m.edges(g)?;
    for e in g.edges() {
        if m.white[e.white].is_none() && m.black[e.black].is_none() {
            return Err(SimError::NotMaximal { white: e.white, black: e.black });
        }
    }
    Ok(g.edges()
        .iter()
        .map(|e| match m.white[e.white] {
            Some(p) if p == e.white_port => "M",
            Some(_) => "O",
            None => "P",
        })
        .map(String::from)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::graph::{gen_instance, Edge, InstanceKind};

    #[test]
    fn single_edge() {
        let g = PortGraph::new(1, 1, vec![Edge { white: 0, white_port: 1, black: 0, black_port: 1 }]).unwrap();
        let run = run_proposal(&g);
        assert_eq!(run.iterations, 1);
        assert_eq!(mm_labeling(&g, &run.matching).unwrap(), vec!["M"]);
    }

    #[test]
    fn ties_go_to_the_smallest_port() {
        // both white nodes propose to the black node in iteration 1
        let e = |w, pw, b, pb| Edge { white: w, white_port: pw, black: b, black_port: pb };
        let g = PortGraph::new(2, 1, vec![e(0, 1, 0, 2), e(1, 1, 0, 1)]).unwrap();
        let run = run_proposal(&g);
        assert_eq!(run.matching.white, vec![None, Some(1)]);
        assert_eq!(mm_labeling(&g, &run.matching).unwrap(), vec!["P", "M"]);
    }

    #[test]
    fn perfect_matching_on_k22() {
        let g = gen_instance(InstanceKind::CompleteBipartite, 2, 0, 5).unwrap();
        let run = run_proposal(&g);
        let labels = mm_labeling(&g, &run.matching).unwrap();
        for w in 0..2 {
            let mut mine: Vec<&str> = g.ports(Side::Active, w).iter().map(|&i| labels[i].as_str()).collect();
            mine.sort();
            assert_eq!(mine, vec!["M", "O"]);
        }
    }

    #[test]
    fn non_maximal_is_reported() {
        let g = gen_instance(InstanceKind::CompleteBipartite, 2, 0, 5).unwrap();
        assert!(matches!(mm_labeling(&g, &MatchingState::empty(&g)), Err(SimError::NotMaximal { .. })));
    }
}
