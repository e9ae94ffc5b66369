#![allow(dead_code)]

use makerforge_core::tree::{TreeHypergraph, VertexId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random tree with random vertical paths of mixed sizes and
/// multiplicities.
pub fn random_paths(seed: u64, vertices: usize, edges: usize) -> TreeHypergraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = random_tree(&mut rng, vertices);
    add_random_paths(h, &mut rng, edges)
}

/// A random tree in which every inner vertex has two children, with about
/// `vertices` vertices (rounded up to odd).
pub fn random_full_paths(seed: u64, vertices: usize, edges: usize) -> TreeHypergraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = TreeHypergraph::new();
    h.add_vertex(None).unwrap();
    while h.vertex_count() < vertices {
        let leaves: Vec<VertexId> = h.leaves().collect();
        let v = leaves[rng.random_range(0..leaves.len())];
        h.add_children(v).unwrap();
    }
    add_random_paths(h, &mut rng, edges)
}

fn random_tree(rng: &mut ChaCha8Rng, vertices: usize) -> TreeHypergraph {
    let mut h = TreeHypergraph::new();
    let root = h.add_vertex(None).unwrap();
    let mut open = vec![root];
    while h.vertex_count() < vertices.max(1) {
        let slot = rng.random_range(0..open.len());
        let p = open[slot];
        let v = h.add_vertex(Some(p)).unwrap();
        if h.children(p).unwrap().count() == 2 {
            open.swap_remove(slot);
        }
        open.push(v);
    }
    h
}

fn add_random_paths(mut h: TreeHypergraph, rng: &mut ChaCha8Rng, edges: usize) -> TreeHypergraph {
    for _ in 0..edges {
        let end = VertexId(rng.random_range(0..h.vertex_count() as u32));
        let level = h.level(end).unwrap();
        let start = h.ancestor_at_level(end, rng.random_range(0..=level)).unwrap();
        h.add_path_edge(start, end, rng.random_range(1..=3)).unwrap();
    }
    h
}

/// Vertex sets of the edges, one entry per edge record.
pub fn vertex_sets(h: &TreeHypergraph) -> Vec<(Vec<u32>, u64)> {
    h.edge_ids()
        .map(|e| {
            let mut vs: Vec<u32> = h.path_vertices(e).unwrap().iter().map(|v| v.0).collect();
            vs.sort_unstable();
            (vs, h.edges()[e.index()].mult)
        })
        .collect()
}

/// Root-to-leaf vertex lists by walking parents.
pub fn branches(h: &TreeHypergraph) -> Vec<Vec<u32>> {
    h.leaves()
        .map(|leaf| {
            let mut path = vec![leaf.0];
            let mut cur = leaf;
            while let Some(p) = h.parent(cur).unwrap() {
                path.push(p.0);
                cur = p;
            }
            path.sort_unstable();
            path
        })
        .collect()
}

pub fn subset(a: &[u32], b: &[u32]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

pub fn intersects(a: &[u32], b: &[u32]) -> bool {
    a.iter().any(|x| b.binary_search(x).is_ok())
}
