//! Random members of the class, used as test instances.

use rand::Rng;

use super::{TreeHypergraph, VertexId};

/// A random binary tree on `vertex_count` vertices (at least `n`, so that
/// some root-to-leaf path has `n` vertices) carrying `edge_count` random
/// `n`-vertex path edges of multiplicity one.
pub fn random_uniform(n: u32, vertex_count: usize, edge_count: usize, rng: &mut impl Rng) -> TreeHypergraph {
    assert!(n >= 1, "edge size must be positive");
    let vertex_count = vertex_count.max(n as usize);
    let mut h = TreeHypergraph::with_target(n);
    let mut cur = h.add_vertex(None).expect("empty tree takes a root");
    for _ in 1..n {
        cur = h.add_vertex(Some(cur)).expect("chain vertex");
    }
    let mut open: Vec<VertexId> = h.vertices().collect();
    while h.vertex_count() < vertex_count {
        let slot = rng.random_range(0..open.len());
        let p = open[slot];
        let v = h.add_vertex(Some(p)).expect("open slot has room");
        if h.children(p).expect("known").count() == 2 {
            open.swap_remove(slot);
        }
        open.push(v);
    }
    let deep: Vec<VertexId> = h
        .vertices()
        .filter(|&v| h.level(v).expect("known") + 1 >= n)
        .collect();
    for _ in 0..edge_count {
        let end = deep[rng.random_range(0..deep.len())];
        let level = h.level(end).expect("known");
        let start = h.ancestor_at_level(end, level + 1 - n).expect("deep enough");
        h.add_path_edge(start, end, 1).expect("ancestor path");
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_instances_are_valid_and_uniform() {
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_uniform(4, 14, 5, &mut rng);
            assert_eq!(h.vertex_count(), 14);
            assert_eq!(h.edge_count(), 5);
            assert_eq!(h.uniform_size(), Some(4));
            assert!(super::super::validate_class_c(&h).is_empty());
        }
    }
}
