//! Port-numbered bipartite graphs and seeded generators.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::problem::Side;

/// Generator recorded in the metadata of generated graphs.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Edge endpoints with 1-based ports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub white: usize,
    pub white_port: usize,
    pub black: usize,
    pub black_port: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortGraphJson {
    pub white: usize,
    pub black: usize,
    pub edges: Vec<[usize; 4]>,
    #[serde(default, skip_serializing_if = "Boundary::is_empty")]
    pub boundary: Boundary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<String>,
}

/// Nodes whose neighborhood is cut off by a finite excerpt.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Boundary {
    #[serde(default)]
    pub white: Vec<usize>,
    #[serde(default)]
    pub black: Vec<usize>,
}

impl Boundary {
    pub fn is_empty(&self) -> bool {
        self.white.is_empty() && self.black.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortGraph {
    white: usize,
    black: usize,
    edges: Vec<Edge>,
    /// Edge index per port, per node.
    white_ports: Vec<Vec<usize>>,
    black_ports: Vec<Vec<usize>>,
    boundary: Boundary,
    meta: Option<String>,
}

impl PortGraph {
    pub fn new(white: usize, black: usize, edges: Vec<Edge>) -> Result<Self, SimError> {
        let mut white_ports: Vec<Vec<Option<usize>>> = vec![Vec::new(); white];
        let mut black_ports: Vec<Vec<Option<usize>>> = vec![Vec::new(); black];
        for (i, e) in edges.iter().enumerate() {
            if e.white >= white || e.black >= black {
                return Err(SimError::InvalidGraph(format!("edge {i} has an endpoint outside the node ranges")));
            }
            for (ports, node, port, side) in [
                (&mut white_ports, e.white, e.white_port, "white"),
                (&mut black_ports, e.black, e.black_port, "black"),
            ] {
                if port == 0 {
                    return Err(SimError::InvalidGraph(format!("edge {i}: ports start at 1")));
                }
                let slots = &mut ports[node];
                if slots.len() < port {
                    slots.resize(port, None);
                }
                if slots[port - 1].replace(i).is_some() {
                    return Err(SimError::InvalidGraph(format!("{side} node {node} uses port {port} twice")));
                }
            }
        }
        let finish = |ports: Vec<Vec<Option<usize>>>, side: &str| -> Result<Vec<Vec<usize>>, SimError> {
            ports
                .into_iter()
                .enumerate()
                .map(|(node, slots)| {
                    slots.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| {
                        SimError::InvalidGraph(format!("ports of {side} node {node} are not 1..deg"))
                    })
                })
                .collect()
        };
        Ok(PortGraph {
            white,
            black,
            white_ports: finish(white_ports, "white")?,
            black_ports: finish(black_ports, "black")?,
            edges,
            boundary: Boundary::default(),
            meta: None,
        })
    }

    pub fn from_json(json: &PortGraphJson) -> Result<Self, SimError> {
        let edges = json
            .edges
            .iter()
            .map(|&[w, pw, b, pb]| Edge { white: w, white_port: pw, black: b, black_port: pb })
            .collect();
        let mut g = PortGraph::new(json.white, json.black, edges)?;
        if json.boundary.white.iter().any(|&v| v >= g.white) || json.boundary.black.iter().any(|&v| v >= g.black) {
            return Err(SimError::InvalidGraph("boundary node outside the node ranges".into()));
        }
        g.boundary = json.boundary.clone();
        g.meta = json.meta.clone();
        Ok(g)
    }

    pub fn to_json(&self) -> PortGraphJson {
        PortGraphJson {
            white: self.white,
            black: self.black,
            edges: self.edges.iter().map(|e| [e.white, e.white_port, e.black, e.black_port]).collect(),
            boundary: self.boundary.clone(),
            meta: self.meta.clone(),
        }
    }

    pub fn white_count(&self) -> usize {
        self.white
    }

    pub fn black_count(&self) -> usize {
        self.black
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn meta(&self) -> Option<&str> {
        self.meta.as_deref()
    }

    pub fn boundary(&self) -> &Boundary {
        &self.boundary
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_meta(mut self, meta: impl Into<String>) -> Self {
        self.meta = Some(meta.into());
        self
    }

    pub fn count(&self, side: Side) -> usize {
        match side {
            Side::Active => self.white,
            Side::Passive => self.black,
        }
    }

    /// Edge indices of a node in port order.
    pub fn ports(&self, side: Side, node: usize) -> &[usize] {
        match side {
            Side::Active => &self.white_ports[node],
            Side::Passive => &self.black_ports[node],
        }
    }

    pub fn degree(&self, side: Side, node: usize) -> usize {
        self.ports(side, node).len()
    }

    pub fn max_degree(&self, side: Side) -> usize {
        (0..self.count(side)).map(|v| self.degree(side, v)).max().unwrap_or(0)
    }

    pub fn is_boundary(&self, side: Side, node: usize) -> bool {
        match side {
            Side::Active => self.boundary.white.contains(&node),
            Side::Passive => self.boundary.black.contains(&node),
        }
    }

    /// Hash of the JSON form.
    pub fn digest(&self) -> String {
        crate::hash::sha256_json(&self.to_json())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    Tree,
    RegularBipartite,
    CompleteBipartite,
}

impl std::str::FromStr for InstanceKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tree" => Ok(InstanceKind::Tree),
            "regular-bipartite" | "regular" => Ok(InstanceKind::RegularBipartite),
            "complete-bipartite" | "complete" => Ok(InstanceKind::CompleteBipartite),
            _ => Err(format!("unknown instance kind {s:?}")),
        }
    }
}

/// Generates an instance deterministically from `seed`.
///
/// For `RegularBipartite`, `n` is the number of nodes on each side. For
/// `Tree`, `n` is the depth of an excerpt rooted at a white node; nodes in
/// the last layer are marked as boundary. `CompleteBipartite` ignores `n`.
pub fn gen_instance(kind: InstanceKind, delta: usize, n: usize, seed: u64) -> Result<PortGraph, SimError> {
    if delta == 0 {
        return Err(SimError::Infeasible("delta must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (white, black, pairs, boundary) = match kind {
        InstanceKind::CompleteBipartite => {
            let pairs = (0..delta).flat_map(|w| (0..delta).map(move |b| (w, b))).collect();
            (delta, delta, pairs, Boundary::default())
        }
        InstanceKind::RegularBipartite => {
            if n < delta {
                return Err(SimError::Infeasible(format!("{delta}-regular bipartite graph needs at least {delta} nodes per side")));
            }
            (n, n, regular_pairs(delta, n, &mut rng), Boundary::default())
        }
        InstanceKind::Tree => {
            let (w, b, pairs, boundary) = tree_pairs(delta, n)?;
            (w, b, pairs, boundary)
        }
    };
    let g = assign_ports(white, black, &pairs, &mut rng)?;
    let kind_name = serde_json::to_value(kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    Ok(g.with_boundary(boundary)
        .with_meta(format!("{RNG_ALGORITHM} seed={seed} kind={kind_name} delta={delta} n={n}")))
}

/// Union of `delta` random perfect matchings with no repeated pair; falls
/// back to a shuffled circulant graph when rejection keeps failing.
fn regular_pairs(delta: usize, n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    'attempt: for _ in 0..64 {
        let mut taken = vec![Vec::<usize>::new(); n];
        let mut pairs = Vec::with_capacity(n * delta);
        for _ in 0..delta {
            let mut perm: Vec<usize> = (0..n).collect();
            let mut placed = false;
            for _ in 0..32 {
                perm.shuffle(rng);
                if (0..n).all(|w| !taken[w].contains(&perm[w])) {
                    placed = true;
                    break;
                }
            }
            if !placed {
                continue 'attempt;
            }
            for w in 0..n {
                taken[w].push(perm[w]);
                pairs.push((w, perm[w]));
            }
        }
        return pairs;
    }
    let mut relabel: Vec<usize> = (0..n).collect();
    relabel.shuffle(rng);
    (0..n).flat_map(|w| (0..delta).map(move |j| (w, (w + j) % n))).map(|(w, b)| (w, relabel[b])).collect()
}

type TreeLayout = (usize, usize, Vec<(usize, usize)>, Boundary);

fn tree_pairs(delta: usize, depth: usize) -> Result<TreeLayout, SimError> {
    let mut white = 1;
    let mut black = 0;
    let mut pairs = Vec::new();
    // frontier of (side is white, node)
    let mut frontier: Vec<(bool, usize)> = vec![(true, 0)];
    for layer in 0..depth {
        let mut next = Vec::new();
        for &(is_white, v) in &frontier {
            let children = if layer == 0 { delta } else { delta - 1 };
            for _ in 0..children {
                if is_white {
                    pairs.push((v, black));
                    next.push((false, black));
                    black += 1;
                } else {
                    pairs.push((white, v));
                    next.push((true, white));
                    white += 1;
                }
                if white + black > 1_000_000 {
                    return Err(SimError::Infeasible("tree excerpt exceeds a million nodes".into()));
                }
            }
        }
        frontier = next;
    }
    let mut boundary = Boundary::default();
    if delta > 1 {
        for (is_white, v) in frontier {
            if is_white {
                boundary.white.push(v);
            } else {
                boundary.black.push(v);
            }
        }
    }
    Ok((white, black, pairs, boundary))
}

fn assign_ports(white: usize, black: usize, pairs: &[(usize, usize)], rng: &mut ChaCha8Rng) -> Result<PortGraph, SimError> {
    let mut white_deg = vec![0; white];
    let mut black_deg = vec![0; black];
    for &(w, b) in pairs {
        white_deg[w] += 1;
        black_deg[b] += 1;
    }
    let perms = |deg: &[usize], rng: &mut ChaCha8Rng| -> Vec<Vec<usize>> {
        deg.iter()
            .map(|&d| {
                let mut p: Vec<usize> = (1..=d).collect();
                p.shuffle(rng);
                p
            })
            .collect()
    };
    let wp = perms(&white_deg, rng);
    let bp = perms(&black_deg, rng);
    let mut wi = vec![0; white];
    let mut bi = vec![0; black];
    let edges = pairs
        .iter()
        .map(|&(w, b)| {
            let e = Edge { white: w, white_port: wp[w][wi[w]], black: b, black_port: bp[b][bi[b]] };
            wi[w] += 1;
            bi[b] += 1;
            e
        })
        .collect();
    PortGraph::new(white, black, edges)
}
