//! The `treehg/1` JSON document and DOT export.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tree::{PathEdge, TreeError, TreeHypergraph, VertexId};

pub const FORMAT: &str = "treehg/1";

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format {0:?}, expected {FORMAT:?}")]
    Format(String),
    #[error("node at position {position} has id {id}; ids must be dense and ordered")]
    NodeOrder { position: usize, id: u32 },
    #[error("node {id}: {source}")]
    Tree { id: u32, source: TreeError },
}

#[derive(Serialize, Deserialize)]
struct NodeDoc {
    id: u32,
    parent: Option<u32>,
}

#[derive(Serialize, Deserialize)]
struct Document {
    format: String,
    n: Option<u32>,
    nodes: Vec<NodeDoc>,
    edges: Vec<PathEdge>,
}

fn document(h: &TreeHypergraph) -> Document {
    Document {
        format: FORMAT.to_string(),
        n: h.uniformity_target(),
        nodes: h
            .vertices()
            .map(|v| NodeDoc {
                id: v.0,
                parent: h.parent(v).expect("listed vertex").map(|p| p.0),
            })
            .collect(),
        edges: h.edges().to_vec(),
    }
}

/// Compact canonical JSON (breadth-first ids, edges sorted by start and end).
pub fn to_json(h: &TreeHypergraph) -> String {
    serde_json::to_string(&document(&h.canonicalize())).expect("document serializes")
}

/// The canonical document as a JSON value, for embedding in other payloads.
pub fn to_value(h: &TreeHypergraph) -> serde_json::Value {
    serde_json::to_value(document(&h.canonicalize())).expect("document serializes")
}

/// Parses a document. Tree structure is enforced; edges are taken as stored
/// so that `validate_class_c` can report malformed ones.
pub fn from_json(text: &str) -> Result<TreeHypergraph, LoadError> {
    from_document(serde_json::from_str(text)?)
}

pub fn from_value(value: serde_json::Value) -> Result<TreeHypergraph, LoadError> {
    from_document(serde_json::from_value(value)?)
}

fn from_document(doc: Document) -> Result<TreeHypergraph, LoadError> {
    if doc.format != FORMAT {
        return Err(LoadError::Format(doc.format));
    }
    let mut h = TreeHypergraph::new();
    h.set_uniformity_target(doc.n);
    for (position, node) in doc.nodes.iter().enumerate() {
        if node.id as usize != position {
            return Err(LoadError::NodeOrder { position, id: node.id });
        }
        h.add_vertex(node.parent.map(VertexId))
            .map_err(|source| LoadError::Tree { id: node.id, source })?;
    }
    for e in doc.edges {
        h.push_edge_unchecked(e);
    }
    Ok(h)
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
    "#17becf",
];

/// Graphviz rendering: gray tree edges, each hyperedge a colored chain along
/// its path (a doubled outline for single-vertex edges), and a legend block.
pub fn to_dot(h: &TreeHypergraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "// {FORMAT} export: {} vertices, {} hyperedges", h.vertex_count(), h.edge_count());
    let _ = writeln!(out, "// legend:");
    for (i, e) in h.edges().iter().enumerate() {
        let size = h
            .edge_size(crate::tree::EdgeId(i as u32))
            .map(|s| s.to_string())
            .unwrap_or_else(|_| "invalid".into());
        let _ = writeln!(
            out,
            "//   h{i} color {} : {} -> {}, size {size}, mult {}",
            PALETTE[i % PALETTE.len()],
            e.start,
            e.end,
            e.mult
        );
    }
    out.push_str("digraph treehg {\n  node [shape=circle, fontsize=10];\n  edge [arrowhead=none];\n");
    for v in h.vertices() {
        let _ = writeln!(out, "  n{} [label=\"{}\"];", v.0, v.0);
    }
    for v in h.vertices() {
        if let Some(p) = h.parent(v).expect("listed vertex") {
            let _ = writeln!(out, "  n{} -> n{} [color=\"#c0c0c0\"];", p.0, v.0);
        }
    }
    for (i, e) in h.edge_ids().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let Ok(path) = h.path_vertices(e) else {
            continue;
        };
        if path.len() == 1 {
            let _ = writeln!(out, "  n{} [peripheries=2, color=\"{color}\"];", path[0].0);
            continue;
        }
        for w in path.windows(2) {
            let _ = writeln!(
                out,
                "  n{} -> n{} [color=\"{color}\", penwidth=2, constraint=false, tooltip=\"h{i}\"];",
                w[0].0, w[1].0
            );
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{es_extremal_tree, theorem1_counterexample};
    use crate::tree::audit_branches;

    #[test]
    fn exact_layout_of_small_document() {
        let h = es_extremal_tree(2).unwrap();
        assert_eq!(
            to_json(&h),
            r#"{"format":"treehg/1","n":2,"nodes":[{"id":0,"parent":null},{"id":1,"parent":0},{"id":2,"parent":0}],"edges":[{"start":0,"end":1,"mult":1},{"start":0,"end":2,"mult":1}]}"#
        );
    }

    #[test]
    fn round_trip_is_byte_identical() {
        for h in [es_extremal_tree(5).unwrap(), theorem1_counterexample(4).unwrap()] {
            let text = to_json(&h);
            let back = from_json(&text).unwrap();
            assert_eq!(to_json(&back), text);
            assert_eq!(audit_branches(&back), audit_branches(&h.canonicalize()));
        }
    }

    #[test]
    fn load_errors() {
        assert!(matches!(from_json("{"), Err(LoadError::Json(_))));
        assert!(matches!(
            from_json(r#"{"format":"x","n":null,"nodes":[],"edges":[]}"#),
            Err(LoadError::Format(_))
        ));
        assert!(matches!(
            from_json(r#"{"format":"treehg/1","n":null,"nodes":[{"id":1,"parent":null}],"edges":[]}"#),
            Err(LoadError::NodeOrder { .. })
        ));
        assert!(matches!(
            from_json(r#"{"format":"treehg/1","n":null,"nodes":[{"id":0,"parent":null},{"id":1,"parent":5}],"edges":[]}"#),
            Err(LoadError::Tree { id: 1, .. })
        ));
        let h = from_json(
            r#"{"format":"treehg/1","n":null,"nodes":[{"id":0,"parent":null}],"edges":[{"start":0,"end":9,"mult":1}]}"#,
        )
        .unwrap();
        assert_eq!(audit_branches(&h).violations.len(), 1);
    }

    #[test]
    fn dot_mentions_every_vertex() {
        let h = es_extremal_tree(3).unwrap();
        let dot = to_dot(&h);
        for v in 0..7 {
            assert!(dot.contains(&format!("  n{v} [label=")));
        }
        assert_eq!(dot.matches("penwidth=2").count(), 8);
    }
}
