use makerforge_core::coloring::{
    build_signed_hypergraph, check_lll_condition, default_pairing, halving_coloring, random_bounded_degree_hypergraph, verify_proper_halving, Color,
    Hypergraph, Pairing,
};
use proptest::prelude::*;

/// Independent monochromatic check on the original edges.
fn proper(h: &Hypergraph, colors: &[Color]) -> bool {
    h.edges.iter().all(|e| {
        let reds = e.iter().filter(|&&v| colors[v as usize] == Color::Red).count();
        reds != 0 && reds != e.len()
    })
}

fn contains_pair(e: &[u32], p: &Pairing) -> bool {
    p.pairs.iter().any(|&(v, w)| e.contains(&v) && e.contains(&w))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn successes_verify(n in 3u32..=8, vertices in 20u32..120, seed in any::<u64>()) {
        let max_degree = ((1u64 << (n - 2)) as f64 / (std::f64::consts::E * n as f64)).floor().max(1.0) as u32;
        let edges = (vertices * max_degree / n) as usize / 2;
        let h = random_bounded_degree_hypergraph(n, max_degree, edges, vertices, seed).unwrap();
        let p = default_pairing(&h, seed);
        if let Ok(c) = halving_coloring(&h, &p, seed) {
            let r = verify_proper_halving(&h, &c).unwrap();
            prop_assert!(r.proper);
            prop_assert!(proper(&h, &c.colors));
            prop_assert_eq!(r.balance, vertices % 2);
            for &(v, w) in &p.pairs {
                prop_assert_ne!(c.colors[v as usize], c.colors[w as usize]);
            }
        }
    }

    #[test]
    fn signed_degree_and_drops(n in 2u32..=6, max_degree in 1u32..6, vertices in 6u32..60, seed in any::<u64>()) {
        let edges = (vertices * max_degree / n) as usize / 2;
        let Ok(h) = random_bounded_degree_hypergraph(n, max_degree, edges, vertices, seed) else {
            return Ok(());
        };
        let p = default_pairing(&h, seed ^ 1);
        let s = build_signed_hypergraph(&h, &p).unwrap();
        prop_assert!(s.max_degree() <= 2 * h.max_degree());
        let dropped: Vec<usize> = (0..h.edges.len()).filter(|&i| contains_pair(&h.edges[i], &p)).collect();
        prop_assert_eq!(&s.dropped_edges, &dropped);
        for (_, lits) in &s.edges {
            let blocks: std::collections::BTreeSet<u32> = lits.iter().map(|l| l.block).collect();
            prop_assert_eq!(blocks.len(), lits.len());
        }
    }

    #[test]
    fn lll_monotone_in_degree(n in 2u32..=16, d in 0u64..400) {
        if check_lll_condition(n, d).holds {
            for smaller in [0, d / 2, d.saturating_sub(1)] {
                prop_assert!(check_lll_condition(n, smaller).holds);
            }
        }
    }

    #[test]
    fn generator_respects_cap(n in 2u32..=10, max_degree in 1u32..10, vertices in 10u32..200, seed in any::<u64>()) {
        let edges = (vertices * max_degree / n) as usize / 3;
        let h = random_bounded_degree_hypergraph(n, max_degree, edges, vertices, seed).unwrap();
        h.validate().unwrap();
        prop_assert_eq!(h.edges.len(), edges);
        prop_assert!(h.max_degree() <= max_degree);
        prop_assert_eq!(&h, &random_bounded_degree_hypergraph(n, max_degree, edges, vertices, seed).unwrap());
    }
}

#[test]
fn dropped_only_needs_no_resampling() {
    let h = Hypergraph { n: Some(2), vertex_count: 4, edges: vec![vec![0, 1], vec![2, 3], vec![0, 1]] };
    let p = Pairing { pairs: vec![(0, 1), (2, 3)], unpaired: None };
    for seed in 0..10 {
        let c = halving_coloring(&h, &p, seed).unwrap();
        assert_eq!(c.resamples, 0);
        assert_eq!(verify_proper_halving(&h, &c).unwrap().balance, 0);
    }
}

#[test]
fn odd_count_leaves_balance_one() {
    let h = random_bounded_degree_hypergraph(5, 2, 10, 31, 3).unwrap();
    let p = default_pairing(&h, 3);
    assert!(p.unpaired.is_some());
    let c = halving_coloring(&h, &p, 3).unwrap();
    let r = verify_proper_halving(&h, &c).unwrap();
    assert!(r.proper);
    assert_eq!(r.balance, 1);
}
