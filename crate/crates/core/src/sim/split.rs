//! Splitting nodes into mininodes that own contiguous port ranges.

use super::graph::{Edge, PortGraph};
use super::SimError;
use crate::problem::Side;

/// Which original node each mininode came from. Edge indices are shared
/// between the two graphs, so an edge set of the split graph is an edge
/// set of the original.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitMap {
    pub white_origin: Vec<usize>,
    pub black_origin: Vec<usize>,
}

/// Part sizes for every node of one side.
pub type Parts = Vec<Vec<usize>>;

/// Contiguous parts of size `size`, the last one possibly smaller.
pub fn uniform_parts(g: &PortGraph, side: Side, size: usize) -> Parts {
    let size = size.max(1);
    (0..g.count(side))
        .map(|v| {
            let d = g.degree(side, v);
            let mut parts = vec![size; d / size];
            if !d.is_multiple_of(size) {
                parts.push(d % size);
            }
            parts
        })
        .collect()
}

/// `ceil(sqrt(delta))`.
pub fn ceil_sqrt(delta: usize) -> usize {
    let r = delta.isqrt();
    if r * r == delta {
        r
    } else {
        r + 1
    }
}

pub fn split_nodes(g: &PortGraph, white_parts: &Parts, black_parts: &Parts) -> Result<(PortGraph, SplitMap), SimError> {
    let (white_slot, white_origin) = layout(g, Side::Active, white_parts)?;
    let (black_slot, black_origin) = layout(g, Side::Passive, black_parts)?;
    let edges = g
        .edges()
        .iter()
        .map(|e| {
            let (w, wp) = white_slot[e.white][e.white_port - 1];
            let (b, bp) = black_slot[e.black][e.black_port - 1];
            Edge { white: w, white_port: wp, black: b, black_port: bp }
        })
        .collect();
    let split = PortGraph::new(white_origin.len(), black_origin.len(), edges)?;
    Ok((split, SplitMap { white_origin, black_origin }))
}

/// For every node and old port, the mininode and its new port.
type Layout = (Vec<Vec<(usize, usize)>>, Vec<usize>);

fn layout(g: &PortGraph, side: Side, parts: &Parts) -> Result<Layout, SimError> {
    if parts.len() != g.count(side) {
        return Err(SimError::Partition(format!("{} part lists for {} nodes", parts.len(), g.count(side))));
    }
    let mut slots = Vec::with_capacity(parts.len());
    let mut origin = Vec::new();
    for (v, sizes) in parts.iter().enumerate() {
        let deg = g.degree(side, v);
        if sizes.iter().sum::<usize>() != deg || sizes.contains(&0) {
            return Err(SimError::Partition(format!("parts {sizes:?} of node {v} do not split degree {deg}")));
        }
        let mut map = Vec::with_capacity(deg);
        for &s in sizes {
            let mini = origin.len();
            origin.push(v);
            map.extend((1..=s).map(|p| (mini, p)));
        }
        slots.push(map);
    }
    Ok((slots, origin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{gen_instance, k_matching_check, run_proposal, InstanceKind};

    #[test]
    fn degree_four_into_pairs() {
        let g = gen_instance(InstanceKind::CompleteBipartite, 4, 0, 2).unwrap();
        let (s, map) = split_nodes(&g, &uniform_parts(&g, Side::Active, 2), &uniform_parts(&g, Side::Passive, 2)).unwrap();
        assert_eq!(s.white_count(), 8);
        assert_eq!(s.max_degree(Side::Active), 2);
        assert_eq!(map.white_origin[..2], [0, 0]);
        let m = run_proposal(&s).matching.edges(&s).unwrap();
        assert!(k_matching_check(&g, &m, 2).unwrap().passed);
    }

    #[test]
    fn single_part_is_the_same_graph() {
        let g = gen_instance(InstanceKind::RegularBipartite, 3, 10, 4).unwrap();
        let (s, _) = split_nodes(&g, &uniform_parts(&g, Side::Active, 3), &uniform_parts(&g, Side::Passive, 3)).unwrap();
        assert_eq!(s.edges(), g.edges());
    }

    #[test]
    fn partition_mismatch() {
        let g = gen_instance(InstanceKind::CompleteBipartite, 2, 0, 2).unwrap();
        let bad = vec![vec![1], vec![2]];
        assert!(matches!(split_nodes(&g, &bad, &uniform_parts(&g, Side::Passive, 1)), Err(SimError::Partition(_))));
    }

    #[test]
    fn ceil_sqrt_values() {
        assert_eq!((ceil_sqrt(4), ceil_sqrt(5), ceil_sqrt(9), ceil_sqrt(16), ceil_sqrt(2)), (2, 3, 3, 4, 2));
    }
}
