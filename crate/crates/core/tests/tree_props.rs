mod common;

use common::{branches, intersects, random_paths, subset, vertex_sets};
use makerforge_core::constructions::{es_extremal_tree, theorem1_counterexample};
use makerforge_core::tree::{audit_branches, validate_class_c, TreeHypergraph};
use makerforge_core::unit_calculus::build_weak;
use makerforge_core::unit_calculus::strong::build_staircase;
use proptest::prelude::*;

fn naive_neighborhood(sets: &[(Vec<u32>, u64)], j: usize) -> u64 {
    sets.iter().filter(|(s, _)| intersects(s, &sets[j].0)).map(|(_, m)| m).sum::<u64>() - 1
}

fn naive_covered(h: &TreeHypergraph) -> bool {
    let sets = vertex_sets(h);
    let bs = branches(h);
    !bs.is_empty() && bs.iter().all(|b| sets.iter().any(|(s, _)| subset(s, b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn include_self_adds_one(seed in any::<u64>(), v in 1usize..60, e in 1usize..40) {
        let h = random_paths(seed, v, e);
        for id in h.edge_ids() {
            prop_assert_eq!(h.neighborhood_size(id, true).unwrap(), h.neighborhood_size(id, false).unwrap() + 1);
        }
    }

    #[test]
    fn degrees_match_brute_force(seed in any::<u64>(), v in 1usize..80, e in 0usize..60) {
        let h = random_paths(seed, v, e);
        let sets = vertex_sets(&h);
        let degs = h.degrees();
        for x in h.vertices() {
            let want: u64 = sets.iter().filter(|(s, _)| s.contains(&x.0)).map(|(_, m)| m).sum();
            prop_assert_eq!(degs[x.index()], want);
            prop_assert_eq!(h.degree(x).unwrap(), want);
        }
    }

    #[test]
    fn neighborhoods_match_brute_force(seed in any::<u64>(), v in 1usize..60, e in 1usize..40) {
        let h = random_paths(seed, v, e);
        let sets = vertex_sets(&h);
        let sizes = h.neighborhood_sizes();
        for (j, s) in sizes.into_iter().enumerate() {
            prop_assert_eq!(s.unwrap(), naive_neighborhood(&sets, j));
        }
    }

    #[test]
    fn coverage_matches_branch_scan(seed in any::<u64>(), v in 1usize..60, e in 0usize..30) {
        let h = random_paths(seed, v, e);
        let a = audit_branches(&h);
        prop_assert_eq!(a.every_branch_covered, naive_covered(&h));
        prop_assert_eq!(a.branches as usize, h.leaves().count());
        prop_assert!(a.violations.is_empty());
    }
}

#[test]
fn degree_brute_force_at_ten_thousand_edges() {
    let h = random_paths(9, 300, 10_000);
    let sets = vertex_sets(&h);
    let mut want = vec![0u64; h.vertex_count()];
    for (s, m) in &sets {
        for &v in s {
            want[v as usize] += m;
        }
    }
    assert_eq!(h.degrees(), want);
}

#[test]
fn coverage_on_constructions() {
    let fixtures = [es_extremal_tree(6).unwrap(), theorem1_counterexample(4).unwrap(), theorem1_counterexample(5).unwrap(), build_weak(4).unwrap()];
    for h in &fixtures {
        assert!(h.leaves().count() <= 1 << 12);
        assert_eq!(audit_branches(h).every_branch_covered, naive_covered(h));
    }
}

#[test]
fn builders_are_in_the_class() {
    for n in 2..=10 {
        assert!(validate_class_c(&es_extremal_tree(n).unwrap()).is_empty());
    }
    for n in 4..=7 {
        assert!(validate_class_c(&theorem1_counterexample(n).unwrap()).is_empty());
    }
    for n in [4, 8] {
        assert!(validate_class_c(&build_weak(n).unwrap()).is_empty());
    }
    for i in 1..=4 {
        let t = build_staircase(i, 3, 1 << 16).unwrap();
        assert!(validate_class_c(t.hypergraph()).is_empty());
    }
}

#[test]
fn theorem1_leaf_depths() {
    for n in 4..=7u32 {
        let h = theorem1_counterexample(n).unwrap();
        let depths: std::collections::BTreeSet<u32> = h.leaves().map(|l| h.level(l).unwrap()).collect();
        assert_eq!(depths.into_iter().collect::<Vec<_>>(), vec![n - 1, 2 * n - 3, 3 * n - 5]);
    }
}

#[test]
fn extremal_counts() {
    for n in 2..=10u32 {
        let h = es_extremal_tree(n).unwrap();
        let a = audit_branches(&h);
        assert_eq!(h.edge_count(), 1 << (n - 1));
        assert_eq!(a.max_degree, 1 << (n - 1));
        assert_eq!(a.max_neighborhood_incl, 1 << (n - 1));
    }
}
