mod common;

use std::collections::BTreeSet;

use common::random_paths;
use graphviz_rust::dot_structures::{Attribute, EdgeTy, Graph, Id, Stmt, Vertex};
use makerforge_core::constructions::{es_extremal_tree, theorem1_counterexample};
use makerforge_core::io::{from_json, to_dot, to_json};
use makerforge_core::tree::{audit_branches, TreeHypergraph};
use proptest::prelude::*;

const FIXTURES: [&str; 4] = ["es3", "es5", "theorem1_4", "weak4"];

fn fixture(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap().trim_end().to_string()
}

#[test]
fn fixtures_round_trip_byte_identical() {
    for name in FIXTURES {
        let text = fixture(name);
        assert_eq!(to_json(&from_json(&text).unwrap()), text, "{name}");
    }
}

#[test]
fn fixtures_match_the_builders() {
    assert_eq!(to_json(&es_extremal_tree(3).unwrap()), fixture("es3"));
    assert_eq!(to_json(&theorem1_counterexample(4).unwrap()), fixture("theorem1_4"));
}

fn plain(id: &Id) -> String {
    match id {
        Id::Plain(s) | Id::Escaped(s) | Id::Html(s) | Id::Anonymous(s) => s.trim_matches('"').to_string(),
    }
}

fn has(attrs: &[Attribute], key: &str) -> Option<String> {
    attrs.iter().find(|a| plain(&a.0) == key).map(|a| plain(&a.1))
}

/// (node ids, hyperedge chain links, doubled single-vertex markers)
fn dot_counts(h: &TreeHypergraph) -> (BTreeSet<String>, usize, usize) {
    let text = to_dot(h);
    let Graph::DiGraph { stmts, .. } = graphviz_rust::parse(&text).expect("DOT parses") else {
        panic!("expected a digraph");
    };
    let (mut nodes, mut links, mut singles) = (BTreeSet::new(), 0, 0);
    for s in stmts {
        match s {
            Stmt::Node(n) => {
                if has(&n.attributes, "peripheries").is_some() {
                    singles += 1;
                } else {
                    nodes.insert(plain(&n.id.0));
                }
            }
            Stmt::Edge(e) if has(&e.attributes, "tooltip").is_some() => {
                if let EdgeTy::Pair(Vertex::N(_), Vertex::N(_)) = e.ty {
                    links += 1;
                }
            }
            _ => {}
        }
    }
    (nodes, links, singles)
}

fn expected(h: &TreeHypergraph) -> (usize, usize, usize) {
    let sizes: Vec<u32> = h.edge_ids().map(|e| h.edge_size(e).unwrap()).collect();
    let links = sizes.iter().map(|&s| s as usize - 1).sum();
    let singles = sizes.iter().filter(|&&s| s == 1).count();
    (h.vertex_count(), links, singles)
}

#[test]
fn dot_of_constructions_parses() {
    for h in [es_extremal_tree(4).unwrap(), theorem1_counterexample(4).unwrap()] {
        let (nodes, links, singles) = dot_counts(&h);
        assert_eq!((nodes.len(), links, singles), expected(&h));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn load_store_preserves_audit(seed in any::<u64>(), v in 1usize..80, e in 0usize..40) {
        let h = random_paths(seed, v, e);
        let text = to_json(&h);
        let back = from_json(&text).unwrap();
        prop_assert_eq!(to_json(&back), text);
        let (a, b) = (audit_branches(&h), audit_branches(&back));
        prop_assert_eq!((a.max_degree, a.max_neighborhood_excl, a.max_neighborhood_incl, a.uniform, a.every_branch_covered),
            (b.max_degree, b.max_neighborhood_excl, b.max_neighborhood_incl, b.uniform, b.every_branch_covered));
    }

    #[test]
    fn dot_has_one_node_per_vertex(seed in any::<u64>(), v in 1usize..500, e in 0usize..30) {
        let h = random_paths(seed, v, e);
        let (nodes, links, singles) = dot_counts(&h);
        prop_assert_eq!((nodes.len(), links, singles), expected(&h));
    }
}

#[test]
fn malformed_documents_are_errors() {
    for text in ["", "[]", "{\"format\":\"treehg/2\",\"n\":null,\"nodes\":[],\"edges\":[]}", "{\"format\":\"treehg/1\",\"n\":null,\"nodes\":[{\"id\":1,\"parent\":null}],\"edges\":[]}"] {
        assert!(from_json(text).is_err(), "{text:?}");
    }
}
