//! Hypergraphs whose vertices form a rooted binary tree and whose hyperedges
//! are vertical paths (an ancestor down to one of its descendants).
//!
//! Edges form a multiset: each [`PathEdge`] carries a multiplicity, and every
//! degree or neighborhood count in this module weighs an edge by it.

mod audit;
pub mod random;

pub use audit::{audit_branches, validate_class_c, AuditReport, Violation};

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense vertex identifier; the root of a non-empty tree is always `VertexId(0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

/// Index of an edge record in a [`TreeHypergraph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// One hyperedge: the tree path from `start` down to `end`, with multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathEdge {
    pub start: VertexId,
    pub end: VertexId,
    pub mult: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("unknown parent {0}")]
    UnknownParent(VertexId),
    #[error("{0} already has two children")]
    ThirdChild(VertexId),
    #[error("the tree already has a root")]
    SecondRoot,
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("{start} is not an ancestor of {end}")]
    NotAncestor { start: VertexId, end: VertexId },
    #[error("edge multiplicity must be positive")]
    ZeroMultiplicity,
    #[error("vertex id space exhausted")]
    TooManyVertices,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Node {
    parent: Option<VertexId>,
    level: u32,
    children: [Option<VertexId>; 2],
}

impl Node {
    fn child_count(&self) -> usize {
        self.children.iter().filter(|c| c.is_some()).count()
    }
}

/// A hypergraph of the tree-path class.
///
/// The tree only grows: vertices are appended with [`add_vertex`](Self::add_vertex)
/// and their levels are cached at insertion. Edges may be rewired by the
/// node-splitting machinery inside this crate, but the public surface keeps
/// every checked edge a valid vertical path. [`push_edge_unchecked`](Self::push_edge_unchecked)
/// exists for loaders and for exercising [`validate_class_c`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TreeHypergraph {
    nodes: Vec<Node>,
    edges: Vec<PathEdge>,
    uniformity_target: Option<u32>,
}

impl TreeHypergraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_target(n: u32) -> Self {
        Self {
            uniformity_target: Some(n),
            ..Self::default()
        }
    }

    pub fn uniformity_target(&self) -> Option<u32> {
        self.uniformity_target
    }

    pub fn set_uniformity_target(&mut self, n: Option<u32>) {
        self.uniformity_target = n;
    }

    pub fn vertex_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> Option<VertexId> {
        (!self.nodes.is_empty()).then_some(VertexId(0))
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        (0..self.nodes.len() as u32).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl ExactSizeIterator<Item = EdgeId> + '_ {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    pub fn edges(&self) -> &[PathEdge] {
        &self.edges
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        v.index() < self.nodes.len()
    }

    fn node(&self, v: VertexId) -> Result<&Node, TreeError> {
        self.nodes.get(v.index()).ok_or(TreeError::UnknownVertex(v))
    }

    pub fn edge(&self, e: EdgeId) -> Result<&PathEdge, TreeError> {
        self.edges.get(e.index()).ok_or(TreeError::UnknownEdge(e))
    }

    pub fn parent(&self, v: VertexId) -> Result<Option<VertexId>, TreeError> {
        Ok(self.node(v)?.parent)
    }

    pub fn level(&self, v: VertexId) -> Result<u32, TreeError> {
        Ok(self.node(v)?.level)
    }

    /// Children in insertion order (left first).
    pub fn children(&self, v: VertexId) -> Result<impl Iterator<Item = VertexId> + '_, TreeError> {
        Ok(self.node(v)?.children.iter().flatten().copied())
    }

    pub fn is_leaf(&self, v: VertexId) -> Result<bool, TreeError> {
        Ok(self.node(v)?.children[0].is_none())
    }

    pub fn leaves(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.children[0].is_none())
            .map(|(i, _)| VertexId(i as u32))
    }

    pub fn depth(&self) -> u32 {
        self.nodes.iter().map(|n| n.level).max().unwrap_or(0)
    }

    /// Appends a vertex below `parent` (or the root when the tree is empty).
    pub fn add_vertex(&mut self, parent: Option<VertexId>) -> Result<VertexId, TreeError> {
        let id = u32::try_from(self.nodes.len()).map_err(|_| TreeError::TooManyVertices)?;
        let id = VertexId(id);
        let level = match parent {
            None if self.nodes.is_empty() => 0,
            None => return Err(TreeError::SecondRoot),
            Some(p) => {
                let node = self
                    .nodes
                    .get_mut(p.index())
                    .ok_or(TreeError::UnknownParent(p))?;
                let slot = node
                    .children
                    .iter_mut()
                    .find(|c| c.is_none())
                    .ok_or(TreeError::ThirdChild(p))?;
                *slot = Some(id);
                node.level + 1
            }
        };
        self.nodes.push(Node {
            parent,
            level,
            children: [None, None],
        });
        Ok(id)
    }

    /// Adds two children to `v` and returns them (left, right).
    pub fn add_children(&mut self, v: VertexId) -> Result<(VertexId, VertexId), TreeError> {
        if !self.is_leaf(v)? {
            return Err(TreeError::ThirdChild(v));
        }
        let a = self.add_vertex(Some(v))?;
        let b = self.add_vertex(Some(v))?;
        Ok((a, b))
    }

    /// Whether `a` lies on the root path of `b` (or equals it).
    pub fn is_ancestor_or_self(&self, a: VertexId, b: VertexId) -> Result<bool, TreeError> {
        let la = self.level(a)?;
        let lb = self.level(b)?;
        if la > lb {
            return Ok(false);
        }
        Ok(self.ancestor_at_level(b, la)? == a)
    }

    /// The ancestor of `v` sitting on `level` (which must not exceed `v`'s level).
    pub fn ancestor_at_level(&self, v: VertexId, level: u32) -> Result<VertexId, TreeError> {
        let mut cur = v;
        let mut node = self.node(v)?;
        while node.level > level {
            cur = node.parent.expect("non-root vertex has a parent");
            node = &self.nodes[cur.index()];
        }
        Ok(cur)
    }

    pub fn add_path_edge(
        &mut self,
        start: VertexId,
        end: VertexId,
        mult: u64,
    ) -> Result<EdgeId, TreeError> {
        if mult == 0 {
            return Err(TreeError::ZeroMultiplicity);
        }
        if !self.is_ancestor_or_self(start, end)? {
            return Err(TreeError::NotAncestor { start, end });
        }
        Ok(self.push_edge_unchecked(PathEdge { start, end, mult }))
    }

    /// Records an edge without any structural check.
    pub fn push_edge_unchecked(&mut self, edge: PathEdge) -> EdgeId {
        let id = EdgeId(self.edges.len() as u32);
        self.edges.push(edge);
        id
    }

    pub(crate) fn edge_mut(&mut self, e: EdgeId) -> Result<&mut PathEdge, TreeError> {
        self.edges.get_mut(e.index()).ok_or(TreeError::UnknownEdge(e))
    }

    /// Keeps the edges for which `keep` returns true. Edge ids are compacted;
    /// the returned table maps every old id to its new id, if it survived.
    pub fn retain_edges(&mut self, mut keep: impl FnMut(EdgeId, &PathEdge) -> bool) -> Vec<Option<EdgeId>> {
        let mut remap = Vec::with_capacity(self.edges.len());
        let mut kept = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            if keep(EdgeId(i as u32), e) {
                remap.push(Some(EdgeId(kept.len() as u32)));
                kept.push(*e);
            } else {
                remap.push(None);
            }
        }
        self.edges = kept;
        remap
    }

    pub fn remove_edge(&mut self, e: EdgeId) -> Result<PathEdge, TreeError> {
        if e.index() >= self.edges.len() {
            return Err(TreeError::UnknownEdge(e));
        }
        Ok(self.edges.remove(e.index()))
    }

    /// Whether the edge is a genuine downward path.
    pub fn edge_is_path(&self, e: &PathEdge) -> bool {
        self.contains_vertex(e.start)
            && self.contains_vertex(e.end)
            && self.is_ancestor_or_self(e.start, e.end).unwrap_or(false)
    }

    /// Number of vertices on the edge's path.
    pub fn edge_size(&self, e: EdgeId) -> Result<u32, TreeError> {
        let edge = *self.edge(e)?;
        self.path_size(&edge)
    }

    fn path_size(&self, edge: &PathEdge) -> Result<u32, TreeError> {
        if !self.is_ancestor_or_self(edge.start, edge.end)? {
            return Err(TreeError::NotAncestor {
                start: edge.start,
                end: edge.end,
            });
        }
        Ok(self.level(edge.end)? - self.level(edge.start)? + 1)
    }

    /// Vertices of the edge from its start down to its end.
    pub fn path_vertices(&self, e: EdgeId) -> Result<Vec<VertexId>, TreeError> {
        let edge = *self.edge(e)?;
        let size = self.path_size(&edge)? as usize;
        let mut out = Vec::with_capacity(size);
        let mut cur = edge.end;
        out.push(cur);
        while cur != edge.start {
            cur = self.nodes[cur.index()].parent.expect("path reaches start");
            out.push(cur);
        }
        out.reverse();
        Ok(out)
    }

    /// Degree of every vertex, weighted by multiplicity. Edges that are not
    /// downward paths are skipped.
    pub fn degrees(&self) -> Vec<u64> {
        let mut deg = vec![0u64; self.nodes.len()];
        for edge in &self.edges {
            if !self.edge_is_path(edge) {
                continue;
            }
            let mut cur = edge.end;
            loop {
                deg[cur.index()] += edge.mult;
                if cur == edge.start {
                    break;
                }
                cur = self.nodes[cur.index()].parent.expect("path reaches start");
            }
        }
        deg
    }

    pub fn degree(&self, v: VertexId) -> Result<u64, TreeError> {
        self.node(v)?;
        let mut total = 0;
        for edge in &self.edges {
            if self.edge_is_path(edge) && self.is_ancestor_or_self(edge.start, v)? && self.is_ancestor_or_self(v, edge.end)? {
                total += edge.mult;
            }
        }
        Ok(total)
    }

    pub fn max_degree(&self) -> u64 {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Total multiplicity of edges starting at each vertex.
    fn start_weights(&self) -> Vec<u64> {
        let mut w = vec![0u64; self.nodes.len()];
        for edge in &self.edges {
            if self.edge_is_path(edge) {
                w[edge.start.index()] += edge.mult;
            }
        }
        w
    }

    /// Number of edges (with multiplicity) meeting `e`. Without `include_self`
    /// one copy of `e` itself is not counted.
    pub fn neighborhood_size(&self, e: EdgeId, include_self: bool) -> Result<u64, TreeError> {
        let table = NeighborhoodTable::new(self);
        table.size(self, e, include_self)
    }

    /// Maximum neighborhood size over all edges; 0 for an edgeless hypergraph.
    pub fn max_neighborhood(&self, include_self: bool) -> u64 {
        let table = NeighborhoodTable::new(self);
        self.edge_ids()
            .filter_map(|e| table.size(self, e, include_self).ok())
            .max()
            .unwrap_or(0)
    }

    /// Neighborhood size of every edge (exclude-self convention).
    pub fn neighborhood_sizes(&self) -> Vec<Result<u64, TreeError>> {
        let table = NeighborhoodTable::new(self);
        self.edge_ids().map(|e| table.size(self, e, false)).collect()
    }

    /// Common edge size when every edge has the same size.
    pub fn uniform_size(&self) -> Option<u32> {
        let mut sizes = self.edges.iter().map(|e| self.path_size(e).ok());
        let first = sizes.next()??;
        sizes.all(|s| s == Some(first)).then_some(first)
    }

    /// Copy with vertices renumbered breadth-first (children kept in order)
    /// and edges sorted by `(start, end)`.
    pub fn canonicalize(&self) -> TreeHypergraph {
        let Some(root) = self.root() else {
            return TreeHypergraph {
                uniformity_target: self.uniformity_target,
                ..TreeHypergraph::default()
            };
        };
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            queue.extend(self.nodes[v.index()].children.iter().flatten().copied());
        }
        let mut new_id = vec![VertexId(u32::MAX); self.nodes.len()];
        for (i, v) in order.iter().enumerate() {
            new_id[v.index()] = VertexId(i as u32);
        }
        let mut out = TreeHypergraph {
            uniformity_target: self.uniformity_target,
            ..TreeHypergraph::default()
        };
        for v in &order {
            let parent = self.nodes[v.index()].parent.map(|p| new_id[p.index()]);
            out.add_vertex(parent).expect("renumbered tree stays valid");
        }
        let mut edges: Vec<PathEdge> = self
            .edges
            .iter()
            .map(|e| PathEdge {
                start: new_id.get(e.start.index()).copied().unwrap_or(e.start),
                end: new_id.get(e.end.index()).copied().unwrap_or(e.end),
                mult: e.mult,
            })
            .collect();
        edges.sort_by_key(|e| (e.start, e.end));
        out.edges = edges;
        out
    }
}

/// Precomputed per-vertex sums for neighborhood queries.
///
/// Two vertical paths meet iff the deeper of the two start vertices lies on
/// the other path. Hence the edges meeting `e` are those passing through the
/// start of `e`, plus those starting strictly inside `e`.
struct NeighborhoodTable {
    degree: Vec<u64>,
    starts: Vec<u64>,
}

impl NeighborhoodTable {
    fn new(h: &TreeHypergraph) -> Self {
        Self {
            degree: h.degrees(),
            starts: h.start_weights(),
        }
    }

    fn size(&self, h: &TreeHypergraph, e: EdgeId, include_self: bool) -> Result<u64, TreeError> {
        let edge = *h.edge(e)?;
        h.path_size(&edge)?;
        let mut total = self.degree[edge.start.index()];
        let mut cur = edge.end;
        while cur != edge.start {
            total += self.starts[cur.index()];
            cur = h.nodes[cur.index()].parent.expect("path reaches start");
        }
        Ok(if include_self { total } else { total - 1 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn es3() -> TreeHypergraph {
        let mut h = TreeHypergraph::with_target(3);
        let r = h.add_vertex(None).unwrap();
        let (a, b) = h.add_children(r).unwrap();
        for p in [a, b] {
            let (x, y) = h.add_children(p).unwrap();
            h.add_path_edge(r, x, 1).unwrap();
            h.add_path_edge(r, y, 1).unwrap();
        }
        h
    }

    #[test]
    fn add_vertex_rules() {
        let mut h = TreeHypergraph::new();
        let r = h.add_vertex(None).unwrap();
        assert_eq!((r, h.level(r).unwrap()), (VertexId(0), 0));
        assert_eq!(h.add_vertex(None), Err(TreeError::SecondRoot));
        let a = h.add_vertex(Some(r)).unwrap();
        let b = h.add_vertex(Some(r)).unwrap();
        assert_eq!((a, b), (VertexId(1), VertexId(2)));
        assert_eq!(h.level(b).unwrap(), 1);
        assert_eq!(h.add_vertex(Some(r)), Err(TreeError::ThirdChild(r)));
        assert_eq!(
            h.add_vertex(Some(VertexId(9))),
            Err(TreeError::UnknownParent(VertexId(9)))
        );
    }

    #[test]
    fn path_edges() {
        let mut h = es3();
        let leftmost = VertexId(3);
        let e = h.add_path_edge(VertexId(0), leftmost, 1).unwrap();
        assert_eq!(h.edge_size(e).unwrap(), 3);
        assert_eq!(
            h.path_vertices(e).unwrap(),
            vec![VertexId(0), VertexId(1), VertexId(3)]
        );
        let s = h.add_path_edge(VertexId(2), VertexId(2), 1).unwrap();
        assert_eq!(h.edge_size(s).unwrap(), 1);
        assert_eq!(
            h.add_path_edge(VertexId(1), VertexId(2), 1),
            Err(TreeError::NotAncestor {
                start: VertexId(1),
                end: VertexId(2)
            })
        );
        assert_eq!(h.add_path_edge(VertexId(0), VertexId(1), 0), Err(TreeError::ZeroMultiplicity));
    }

    #[test]
    fn degrees_and_neighborhoods_on_extremal_tree() {
        let h = es3();
        assert_eq!(h.degree(VertexId(0)).unwrap(), 4);
        for leaf in h.leaves() {
            assert_eq!(h.degree(leaf).unwrap(), 1);
        }
        assert_eq!(h.max_degree(), 4);
        for e in h.edge_ids() {
            assert_eq!(h.neighborhood_size(e, false).unwrap(), 3);
            assert_eq!(h.neighborhood_size(e, true).unwrap(), 4);
        }
        assert_eq!(h.uniform_size(), Some(3));
        assert_eq!(h.degree(VertexId(40)), Err(TreeError::UnknownVertex(VertexId(40))));
        assert_eq!(
            h.neighborhood_size(EdgeId(17), false),
            Err(TreeError::UnknownEdge(EdgeId(17)))
        );
    }

    #[test]
    fn single_edge_neighborhood() {
        let mut h = TreeHypergraph::new();
        let r = h.add_vertex(None).unwrap();
        let e = h.add_path_edge(r, r, 1).unwrap();
        assert_eq!(h.neighborhood_size(e, false).unwrap(), 0);
        assert_eq!(h.max_neighborhood(false), 0);
        assert_eq!(TreeHypergraph::new().max_degree(), 0);
    }

    #[test]
    fn multiplicity_counts() {
        let mut h = TreeHypergraph::new();
        let r = h.add_vertex(None).unwrap();
        let (a, _) = h.add_children(r).unwrap();
        let e = h.add_path_edge(r, a, 3).unwrap();
        h.add_path_edge(a, a, 2).unwrap();
        assert_eq!(h.degree(a).unwrap(), 5);
        // two other copies of e plus the doubled singleton
        assert_eq!(h.neighborhood_size(e, false).unwrap(), 4);
        assert_eq!(h.neighborhood_size(e, true).unwrap(), 5);
    }

    #[test]
    fn canonical_form_is_breadth_first() {
        let mut h = TreeHypergraph::new();
        let r = h.add_vertex(None).unwrap();
        let a = h.add_vertex(Some(r)).unwrap();
        let a1 = h.add_vertex(Some(a)).unwrap();
        let b = h.add_vertex(Some(r)).unwrap();
        h.add_path_edge(b, b, 1).unwrap();
        h.add_path_edge(r, a1, 1).unwrap();
        let c = h.canonicalize();
        assert_eq!(c.parent(VertexId(2)).unwrap(), Some(VertexId(0)));
        assert_eq!(c.parent(VertexId(3)).unwrap(), Some(VertexId(1)));
        assert_eq!(c.edges()[0], PathEdge { start: VertexId(0), end: VertexId(3), mult: 1 });
        assert_eq!(c.edges()[1], PathEdge { start: VertexId(2), end: VertexId(2), mult: 1 });
        assert_eq!(c.canonicalize(), c);
    }
}
