use serde::{Deserialize, Serialize};

use super::{EdgeId, TreeHypergraph, VertexId};

/// One structural finding of [`validate_class_c`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    BadParent { vertex: VertexId },
    TooManyChildren { vertex: VertexId },
    LevelMismatch { vertex: VertexId },
    UnknownEndpoint { edge: EdgeId },
    NotAPath { edge: EdgeId },
    ZeroMultiplicity { edge: EdgeId },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub vertices: usize,
    pub edges: usize,
    pub uniform: Option<u32>,
    pub max_degree: u64,
    pub root_degree: u64,
    pub max_neighborhood_excl: u64,
    pub max_neighborhood_incl: u64,
    pub every_branch_covered: bool,
    pub branches: u64,
    pub uncovered_branches: u64,
    pub violations: Vec<Violation>,
}

/// Checks every structural invariant of the class and lists the findings.
pub fn validate_class_c(h: &TreeHypergraph) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut child_count = vec![0u8; h.nodes.len()];
    for (i, node) in h.nodes.iter().enumerate() {
        let vertex = VertexId(i as u32);
        match node.parent {
            None if i == 0 => {
                if node.level != 0 {
                    out.push(Violation::LevelMismatch { vertex });
                }
            }
            None => out.push(Violation::BadParent { vertex }),
            Some(p) if p.index() >= i => out.push(Violation::BadParent { vertex }),
            Some(p) => {
                child_count[p.index()] = child_count[p.index()].saturating_add(1);
                if node.level != h.nodes[p.index()].level + 1 {
                    out.push(Violation::LevelMismatch { vertex });
                }
            }
        }
    }
    for (i, &c) in child_count.iter().enumerate() {
        if c > 2 || h.nodes[i].child_count() != c as usize {
            out.push(Violation::TooManyChildren {
                vertex: VertexId(i as u32),
            });
        }
    }
    for (i, e) in h.edges.iter().enumerate() {
        let edge = EdgeId(i as u32);
        if e.mult == 0 {
            out.push(Violation::ZeroMultiplicity { edge });
        }
        if !h.contains_vertex(e.start) || !h.contains_vertex(e.end) {
            out.push(Violation::UnknownEndpoint { edge });
        } else if !h.edge_is_path(e) {
            out.push(Violation::NotAPath { edge });
        }
    }
    out
}

/// Full audit: structure, uniformity, degree and neighborhood maxima and
/// branch coverage. Edges that are not paths are reported and skipped.
pub fn audit_branches(h: &TreeHypergraph) -> AuditReport {
    let violations = validate_class_c(h);
    let degrees = h.degrees();
    let (branches, uncovered) = branch_coverage(h);
    let excl = h.max_neighborhood(false);
    let incl = if h.edges.is_empty() { 0 } else { h.max_neighborhood(true) };
    AuditReport {
        vertices: h.vertex_count(),
        edges: h.edge_count(),
        uniform: h.uniform_size(),
        max_degree: degrees.iter().copied().max().unwrap_or(0),
        root_degree: degrees.first().copied().unwrap_or(0),
        max_neighborhood_excl: excl,
        max_neighborhood_incl: incl,
        every_branch_covered: branches > 0 && uncovered == 0,
        branches,
        uncovered_branches: uncovered,
        violations,
    }
}

/// Counts (branches, uncovered branches). An edge lies on a branch iff its
/// end is an ancestor-or-self of the branch's leaf, so one pass from the
/// root carrying a "covered" flag suffices.
fn branch_coverage(h: &TreeHypergraph) -> (u64, u64) {
    let Some(root) = h.root() else {
        return (0, 0);
    };
    let mut ends = vec![false; h.nodes.len()];
    for e in &h.edges {
        if e.mult > 0 && h.edge_is_path(e) {
            ends[e.end.index()] = true;
        }
    }
    let (mut branches, mut uncovered) = (0, 0);
    let mut stack = vec![(root, false)];
    while let Some((v, above)) = stack.pop() {
        let covered = above || ends[v.index()];
        let node = &h.nodes[v.index()];
        if node.children[0].is_none() {
            branches += 1;
            if !covered {
                uncovered += 1;
            }
        }
        for c in node.children.iter().flatten() {
            stack.push((*c, covered));
        }
    }
    (branches, uncovered)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::PathEdge;

    #[test]
    fn sibling_edge_is_one_violation() {
        let mut h = TreeHypergraph::new();
        let r = h.add_vertex(None).unwrap();
        let (a, b) = h.add_children(r).unwrap();
        h.add_path_edge(r, a, 1).unwrap();
        assert!(validate_class_c(&h).is_empty());
        h.push_edge_unchecked(PathEdge { start: a, end: b, mult: 1 });
        assert_eq!(validate_class_c(&h), vec![Violation::NotAPath { edge: EdgeId(1) }]);
        h.push_edge_unchecked(PathEdge { start: a, end: VertexId(77), mult: 0 });
        assert_eq!(validate_class_c(&h).len(), 3);
    }

    #[test]
    fn edgeless_tree_is_uncovered() {
        let mut h = TreeHypergraph::new();
        let r = h.add_vertex(None).unwrap();
        h.add_children(r).unwrap();
        let report = audit_branches(&h);
        assert_eq!(report.max_degree, 0);
        assert_eq!(report.max_neighborhood_excl, 0);
        assert_eq!(report.max_neighborhood_incl, 0);
        assert!(!report.every_branch_covered);
        assert_eq!((report.branches, report.uncovered_branches), (2, 2));
    }

    #[test]
    fn partial_cover() {
        let mut h = TreeHypergraph::new();
        let r = h.add_vertex(None).unwrap();
        let (a, _) = h.add_children(r).unwrap();
        h.add_path_edge(a, a, 1).unwrap();
        let report = audit_branches(&h);
        assert_eq!(report.uncovered_branches, 1);
        h.add_path_edge(r, r, 1).unwrap();
        assert!(audit_branches(&h).every_branch_covered);
    }
}
