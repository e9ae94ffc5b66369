//! Pairings, the signed hypergraph and proper halving 2-colorings.
//!
//! A pairing fixes the two colors of each pair to differ, which makes every
//! pairing-respecting coloring balanced. The coloring itself is found by
//! resampling the pairs that meet a monochromatic edge.

mod lll;
mod resample;

use std::collections::BTreeSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use lll::{check_lll_condition, lll_degree_threshold, LllCheck};
pub use resample::{halving_coloring, halving_coloring_with_budget, DEFAULT_MAX_RESAMPLES};

use crate::tree::TreeHypergraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("invalid pairing: {0}")]
    InvalidPairing(String),
    #[error("resample budget exhausted after {resamples} resamples, {} bad edges left", bad_edges.len())]
    ResampleBudgetExceeded { resamples: u64, bad_edges: Vec<usize> },
    #[error("vertex {0} has no color")]
    UnknownVertex(u32),
    #[error("coloring has {colors} entries for {vertices} vertices")]
    SizeMismatch { colors: usize, vertices: usize },
    #[error("infeasible: {edges} edges of size {n} need more than {vertices} vertices of degree {max_degree}")]
    Infeasible { n: u32, max_degree: u32, edges: usize, vertices: usize },
    #[error("generation stalled after {placed} of {edges} edges")]
    GenerationStalled { placed: usize, edges: usize },
    #[error("malformed hypergraph: {0}")]
    Malformed(String),
}

/// A plain hypergraph on vertices `0..vertex_count`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    pub n: Option<u32>,
    pub vertex_count: u32,
    pub edges: Vec<Vec<u32>>,
}

impl Hypergraph {
    /// The vertex sets of the path edges, one entry per unit of multiplicity.
    pub fn from_tree(h: &TreeHypergraph) -> Self {
        let mut edges = Vec::new();
        for e in h.edge_ids() {
            let mut vs: Vec<u32> = h.path_vertices(e).expect("own edge").iter().map(|v| v.0).collect();
            vs.sort_unstable();
            for _ in 0..h.edges()[e.index()].mult {
                edges.push(vs.clone());
            }
        }
        Hypergraph {
            n: h.uniform_size(),
            vertex_count: h.vertex_count() as u32,
            edges,
        }
    }

    pub fn validate(&self) -> Result<(), ColoringError> {
        for (i, e) in self.edges.iter().enumerate() {
            if e.is_empty() {
                return Err(ColoringError::Malformed(format!("edge {i} is empty")));
            }
            let set: BTreeSet<u32> = e.iter().copied().collect();
            if set.len() != e.len() {
                return Err(ColoringError::Malformed(format!("edge {i} repeats a vertex")));
            }
            if let Some(&v) = set.iter().next_back().filter(|&&v| v >= self.vertex_count) {
                return Err(ColoringError::Malformed(format!("edge {i} names vertex {v} of {}", self.vertex_count)));
            }
            if self.n.is_some_and(|n| e.len() != n as usize) {
                return Err(ColoringError::Malformed(format!("edge {i} has size {}", e.len())));
            }
        }
        Ok(())
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut d = vec![0u32; self.vertex_count as usize];
        for e in &self.edges {
            for &v in e {
                d[v as usize] += 1;
            }
        }
        d
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees().into_iter().max().unwrap_or(0)
    }
}

/// Disjoint vertex pairs covering every vertex but at most one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing {
    pub pairs: Vec<(u32, u32)>,
    pub unpaired: Option<u32>,
}

impl Pairing {
    pub fn validate(&self, vertex_count: u32) -> Result<(), ColoringError> {
        let mut seen = vec![false; vertex_count as usize];
        let all = self.pairs.iter().flat_map(|&(v, w)| [v, w]).chain(self.unpaired);
        for v in all {
            let slot = seen
                .get_mut(v as usize)
                .ok_or_else(|| ColoringError::InvalidPairing(format!("vertex {v} out of range")))?;
            if *slot {
                return Err(ColoringError::InvalidPairing(format!("vertex {v} used twice")));
            }
            *slot = true;
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(ColoringError::InvalidPairing(format!("vertex {v} is not covered")));
        }
        if self.unpaired.is_some() && vertex_count % 2 == 0 {
            return Err(ColoringError::InvalidPairing("unpaired vertex with an even vertex count".into()));
        }
        Ok(())
    }

    /// `pair_of[v]` is the index of the pair holding `v`.
    fn pair_of(&self, vertex_count: u32) -> Vec<Option<(usize, bool)>> {
        let mut out = vec![None; vertex_count as usize];
        for (k, &(v, w)) in self.pairs.iter().enumerate() {
            out[v as usize] = Some((k, true));
            out[w as usize] = Some((k, false));
        }
        out
    }
}

/// Seeded random perfect matching; the last vertex stays single when the
/// count is odd.
pub fn default_pairing(h: &Hypergraph, seed: u64) -> Pairing {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids: Vec<u32> = (0..h.vertex_count).collect();
    ids.shuffle(&mut rng);
    let unpaired = if ids.len() % 2 == 1 { ids.pop() } else { None };
    let pairs = ids.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    Pairing { pairs, unpaired }
}

/// `block` is a pair index, or `pairs.len()` for the unpaired vertex.
/// A positive literal is the first vertex of the pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub block: u32,
    pub positive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedHypergraph {
    pub blocks: u32,
    /// Literals of the surviving edges, with the original edge index.
    pub edges: Vec<(usize, Vec<Literal>)>,
    /// Edges holding both vertices of a pair; no pairing-respecting
    /// coloring makes them monochromatic.
    pub dropped_edges: Vec<usize>,
}

impl SignedHypergraph {
    /// Number of signed edges with a literal of each block.
    pub fn block_degrees(&self) -> Vec<u32> {
        let mut d = vec![0u32; self.blocks as usize];
        for (_, lits) in &self.edges {
            for l in lits {
                d[l.block as usize] += 1;
            }
        }
        d
    }

    pub fn max_degree(&self) -> u32 {
        self.block_degrees().into_iter().max().unwrap_or(0)
    }
}

pub fn build_signed_hypergraph(h: &Hypergraph, pairing: &Pairing) -> Result<SignedHypergraph, ColoringError> {
    pairing.validate(h.vertex_count)?;
    let pair_of = pairing.pair_of(h.vertex_count);
    let single = pairing.pairs.len() as u32;
    let mut edges = Vec::new();
    let mut dropped_edges = Vec::new();
    'edges: for (i, e) in h.edges.iter().enumerate() {
        let mut lits: Vec<Literal> = Vec::with_capacity(e.len());
        for &v in e {
            let lit = match pair_of.get(v as usize) {
                Some(Some((k, positive))) => Literal {
                    block: *k as u32,
                    positive: *positive,
                },
                Some(None) => Literal {
                    block: single,
                    positive: true,
                },
                None => return Err(ColoringError::UnknownVertex(v)),
            };
            lits.push(lit);
        }
        lits.sort_unstable();
        for w in lits.windows(2) {
            if w[0].block == w[1].block {
                dropped_edges.push(i);
                continue 'edges;
            }
        }
        edges.push((i, lits));
    }
    Ok(SignedHypergraph {
        blocks: single + u32::from(pairing.unpaired.is_some()),
        edges,
        dropped_edges,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub colors: Vec<Color>,
    /// Edge resamples spent finding it.
    pub resamples: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalvingCheck {
    pub proper: bool,
    pub balance: u32,
    pub monochromatic: Vec<usize>,
}

/// Checks against the original edges, independently of any pairing.
pub fn verify_proper_halving(h: &Hypergraph, coloring: &Coloring) -> Result<HalvingCheck, ColoringError> {
    let colors = &coloring.colors;
    let mut monochromatic = Vec::new();
    for (i, e) in h.edges.iter().enumerate() {
        let mut seen = [false; 2];
        for &v in e {
            let c = colors.get(v as usize).ok_or(ColoringError::UnknownVertex(v))?;
            seen[*c as usize] = true;
        }
        if !(seen[0] && seen[1]) {
            monochromatic.push(i);
        }
    }
    if colors.len() != h.vertex_count as usize {
        return Err(ColoringError::SizeMismatch {
            colors: colors.len(),
            vertices: h.vertex_count as usize,
        });
    }
    let red = colors.iter().filter(|&&c| c == Color::Red).count() as i64;
    let blue = colors.len() as i64 - red;
    Ok(HalvingCheck {
        proper: monochromatic.is_empty(),
        balance: (red - blue).unsigned_abs() as u32,
        monochromatic,
    })
}

/// Random `n`-sets under a degree cap: each edge draws `n` distinct vertices
/// among those with spare degree, rejecting repeats of earlier edges.
pub fn random_bounded_degree_hypergraph(n: u32, max_degree: u32, edge_count: usize, vertex_count: u32, seed: u64) -> Result<Hypergraph, ColoringError> {
    let infeasible = ColoringError::Infeasible {
        n,
        max_degree,
        edges: edge_count,
        vertices: vertex_count as usize,
    };
    let too_many = (edge_count as u64) * u64::from(n) > u64::from(vertex_count) * u64::from(max_degree);
    if edge_count > 0 && (n == 0 || n > vertex_count || too_many) {
        return Err(infeasible);
    }
    const RETRIES: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spare: Vec<u32> = vec![max_degree; vertex_count as usize];
    let mut open: Vec<u32> = if max_degree > 0 { (0..vertex_count).collect() } else { Vec::new() };
    let mut seen = BTreeSet::new();
    let mut edges = Vec::with_capacity(edge_count);
    while edges.len() < edge_count {
        let mut placed = false;
        for _ in 0..RETRIES {
            if open.len() < n as usize {
                break;
            }
            let mut e: Vec<u32> = open.choose_multiple(&mut rng, n as usize).copied().collect();
            e.sort_unstable();
            if seen.insert(e.clone()) {
                for &v in &e {
                    spare[v as usize] -= 1;
                }
                open.retain(|&v| spare[v as usize] > 0);
                edges.push(e);
                placed = true;
                break;
            }
            // a shuffle keeps later draws from repeating the same pattern
            let k = rng.random_range(0..open.len());
            open.swap(0, k);
        }
        if !placed {
            return Err(ColoringError::GenerationStalled {
                placed: edges.len(),
                edges: edge_count,
            });
        }
    }
    Ok(Hypergraph {
        n: Some(n),
        vertex_count,
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_edge() -> Hypergraph {
        Hypergraph {
            n: Some(2),
            vertex_count: 2,
            edges: vec![vec![0, 1]],
        }
    }

    #[test]
    fn pairings() {
        let h4 = Hypergraph { n: None, vertex_count: 4, edges: vec![] };
        let p = default_pairing(&h4, 1);
        assert_eq!(p.pairs.len(), 2);
        assert_eq!(p.unpaired, None);
        p.validate(4).unwrap();
        let h5 = Hypergraph { n: None, vertex_count: 5, edges: vec![] };
        let p = default_pairing(&h5, 1);
        assert_eq!((p.pairs.len(), p.unpaired.is_some()), (2, true));
        assert_eq!(p, default_pairing(&h5, 1));
        let bad = Pairing { pairs: vec![(0, 1), (1, 2)], unpaired: None };
        assert!(matches!(bad.validate(3), Err(ColoringError::InvalidPairing(_))));
    }

    #[test]
    fn pair_inside_edge_is_dropped() {
        let p = Pairing { pairs: vec![(0, 1)], unpaired: None };
        let s = build_signed_hypergraph(&one_edge(), &p).unwrap();
        assert_eq!(s.dropped_edges, vec![0]);
        assert!(s.edges.is_empty());
    }

    #[test]
    fn literals_substituted() {
        let h = Hypergraph { n: Some(2), vertex_count: 4, edges: vec![vec![0, 2], vec![1, 2]] };
        let p = Pairing { pairs: vec![(0, 1), (2, 3)], unpaired: None };
        let s = build_signed_hypergraph(&h, &p).unwrap();
        let pos = |b| Literal { block: b, positive: true };
        assert_eq!(s.edges[0].1, vec![pos(0), pos(1)]);
        assert_eq!(s.edges[1].1, vec![Literal { block: 0, positive: false }, pos(1)]);
        // block 0 meets both edges: deg(0) + deg(1) = 2
        assert_eq!(s.block_degrees(), vec![2, 2]);
    }

    #[test]
    fn verify_all_red() {
        let c = Coloring { colors: vec![Color::Red; 2], resamples: 0 };
        let r = verify_proper_halving(&one_edge(), &c).unwrap();
        assert!(!r.proper);
        assert_eq!(r.balance, 2);
        let short = Coloring { colors: vec![Color::Red], resamples: 0 };
        assert_eq!(verify_proper_halving(&one_edge(), &short), Err(ColoringError::UnknownVertex(1)));
    }

    #[test]
    fn generator() {
        let h = random_bounded_degree_hypergraph(10, 9, 50, 200, 7).unwrap();
        h.validate().unwrap();
        assert_eq!(h.edges.len(), 50);
        assert!(h.max_degree() <= 9);
        assert_eq!(h, random_bounded_degree_hypergraph(10, 9, 50, 200, 7).unwrap());
        assert!(matches!(random_bounded_degree_hypergraph(10, 1, 21, 200, 7), Err(ColoringError::Infeasible { .. })));
    }

    #[test]
    fn from_tree_counts_multiplicity() {
        let t = crate::constructions::es_extremal_tree(3).unwrap();
        let h = Hypergraph::from_tree(&t);
        assert_eq!(h.edges.len(), 4);
        assert_eq!(h.edges[0], vec![0, 1, 3]);
        h.validate().unwrap();
    }
}
