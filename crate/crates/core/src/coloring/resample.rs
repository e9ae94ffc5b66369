use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{build_signed_hypergraph, Color, Coloring, ColoringError, Hypergraph, Pairing};

pub const DEFAULT_MAX_RESAMPLES: u64 = 1_000_000;

pub fn halving_coloring(h: &Hypergraph, pairing: &Pairing, seed: u64) -> Result<Coloring, ColoringError> {
    halving_coloring_with_budget(h, pairing, seed, DEFAULT_MAX_RESAMPLES)
}

/// One random bit per block; while a signed edge is monochromatic, redraws
/// every block it meets. The lowest-index bad edge goes first.
pub fn halving_coloring_with_budget(h: &Hypergraph, pairing: &Pairing, seed: u64, max_resamples: u64) -> Result<Coloring, ColoringError> {
    let s = build_signed_hypergraph(h, pairing)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut value: Vec<bool> = (0..s.blocks).map(|_| rng.random()).collect();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); s.blocks as usize];
    for (j, (_, lits)) in s.edges.iter().enumerate() {
        for l in lits {
            incident[l.block as usize].push(j);
        }
    }
    let is_red = |value: &[bool], block: u32, positive: bool| value[block as usize] == positive;
    let mut red: Vec<usize> = s
        .edges
        .iter()
        .map(|(_, lits)| lits.iter().filter(|l| is_red(&value, l.block, l.positive)).count())
        .collect();
    let bad_at = |red: &[usize], j: usize| red[j] == 0 || red[j] == s.edges[j].1.len();
    let mut bad: BTreeSet<usize> = (0..s.edges.len()).filter(|&j| bad_at(&red, j)).collect();
    let mut resamples = 0u64;
    while let Some(&j) = bad.iter().next() {
        if resamples >= max_resamples {
            return Err(ColoringError::ResampleBudgetExceeded {
                resamples,
                bad_edges: bad.iter().map(|&j| s.edges[j].0).collect(),
            });
        }
        resamples += 1;
        for k in 0..s.edges[j].1.len() {
            let b = s.edges[j].1[k].block as usize;
            let next: bool = rng.random();
            if next == value[b] {
                continue;
            }
            value[b] = next;
            for &f in &incident[b] {
                let lit = s.edges[f].1.iter().find(|l| l.block as usize == b).expect("incident");
                if is_red(&value, lit.block, lit.positive) {
                    red[f] += 1;
                } else {
                    red[f] -= 1;
                }
                if bad_at(&red, f) {
                    bad.insert(f);
                } else {
                    bad.remove(&f);
                }
            }
        }
    }
    let paint = |red: bool| if red { Color::Red } else { Color::Blue };
    let mut colors = vec![Color::Red; h.vertex_count as usize];
    for (k, &(v, w)) in pairing.pairs.iter().enumerate() {
        colors[v as usize] = paint(value[k]);
        colors[w as usize] = paint(!value[k]);
    }
    if let Some(u) = pairing.unpaired {
        colors[u as usize] = paint(value[pairing.pairs.len()]);
    }
    Ok(Coloring { colors, resamples })
}
