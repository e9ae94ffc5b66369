//! Materialized backend: a [`TreeHypergraph`] plus the unit lists of its leaves.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigUint;

use super::backend::{BackendSnapshot, UnitBackend};
use super::unit::{collapse_plan, extend_profile, Route, SplitPlan, UnitShape};
use super::CalcError;
use crate::tree::{audit_branches, EdgeId, PathEdge, TreeHypergraph, VertexId};

/// Largest `log d` whose multiplicities fit the edge records.
pub const EXPLICIT_MAX_LOG_D: u32 = 62;

#[derive(Clone, Debug)]
pub struct SplitOutcome {
    pub children: (VertexId, VertexId),
    pub singletons: [Option<EdgeId>; 2],
}

/// Adds two children to the leaf `u`, extends the edges of `parts[i]` (which
/// must end at `u`) down to child `i`, and adds the singleton edges `{child i}`
/// with the given multiplicities.
pub fn split_node(
    h: &mut TreeHypergraph,
    u: VertexId,
    parts: [&[EdgeId]; 2],
    singletons: [Option<u64>; 2],
) -> Result<SplitOutcome, CalcError> {
    if !h.is_leaf(u)? {
        return Err(CalcError::NotALeaf(u));
    }
    let mut seen = HashSet::new();
    for &e in parts.iter().flat_map(|p| p.iter()) {
        let edge = h.edge(e).map_err(|_| CalcError::NotAPartition(e))?;
        if edge.end != u || !seen.insert(e) {
            return Err(CalcError::NotAPartition(e));
        }
    }
    if singletons.iter().flatten().any(|&m| m == 0) {
        return Err(crate::tree::TreeError::ZeroMultiplicity.into());
    }
    let (a, b) = h.add_children(u)?;
    for (part, child) in parts.iter().zip([a, b]) {
        for &e in part.iter() {
            h.edge_mut(e)?.end = child;
        }
    }
    let mut ids = [None, None];
    for (slot, (m, child)) in ids.iter_mut().zip(singletons.iter().zip([a, b])) {
        if let Some(m) = m {
            *slot = Some(h.add_path_edge(child, child, *m)?);
        }
    }
    Ok(SplitOutcome {
        children: (a, b),
        singletons: ids,
    })
}

/// One unit as stored: its edge records (sorted by id) and its power.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unit {
    pub edges: Vec<EdgeId>,
    pub power: u32,
}

/// The explicit backend. Groups are lists of leaves.
#[derive(Clone, Debug)]
pub struct UnitTree {
    hg: TreeHypergraph,
    log_d: u32,
    units: HashMap<VertexId, Vec<Unit>>,
    terminal: HashSet<VertexId>,
    budget: u64,
}

impl UnitTree {
    fn empty(log_d: u32, budget: u64) -> Result<Self, CalcError> {
        if log_d > EXPLICIT_MAX_LOG_D {
            return Err(CalcError::OutOfRange {
                what: "log d",
                value: log_d.into(),
            });
        }
        Ok(Self {
            hg: TreeHypergraph::new(),
            log_d,
            units: HashMap::new(),
            terminal: HashSet::new(),
            budget,
        })
    }

    /// A single root carrying no units.
    pub fn root(log_d: u32, budget: u64) -> Result<(Self, Vec<VertexId>), CalcError> {
        let mut t = Self::empty(log_d, budget)?;
        let r = t.hg.add_vertex(None)?;
        Ok((t, vec![r]))
    }

    /// Complete tree with `log d + 1` levels in which the path from every
    /// vertex `v` to every leaf below it is an edge of multiplicity
    /// `2^level(v)`. Each leaf's unit `i` is the edge starting on level `i`.
    pub fn lemma_first(log_d: u32, budget: u64) -> Result<(Self, Vec<VertexId>), CalcError> {
        let mut t = Self::empty(log_d, budget)?;
        if (1u128 << (log_d + 1)) - 1 > budget as u128 {
            return Err(CalcError::TooLarge { budget });
        }
        let r = t.hg.add_vertex(None)?;
        let mut frontier = vec![r];
        for _ in 0..log_d {
            let mut next = Vec::with_capacity(frontier.len() * 2);
            for v in frontier {
                let (a, b) = t.hg.add_children(v)?;
                next.extend([a, b]);
            }
            frontier = next;
        }
        for &leaf in &frontier {
            let mut list = Vec::with_capacity(log_d as usize + 1);
            for i in 0..=log_d {
                let start = t.hg.ancestor_at_level(leaf, i)?;
                let e = t.hg.add_path_edge(start, leaf, 1 << i)?;
                list.push(Unit { edges: vec![e], power: 0 });
            }
            t.units.insert(leaf, list);
        }
        Ok((t, frontier))
    }

    pub fn hypergraph(&self) -> &TreeHypergraph {
        &self.hg
    }

    pub fn units_at(&self, leaf: VertexId) -> &[Unit] {
        self.units.get(&leaf).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_terminal(&self, leaf: VertexId) -> bool {
        self.terminal.contains(&leaf)
    }

    pub fn leaves(&self) -> Vec<VertexId> {
        self.hg.leaves().collect()
    }

    /// Shapes of a leaf's units, measured from the edges themselves.
    pub fn measure(&self, leaf: VertexId) -> Result<Vec<UnitShape>, CalcError> {
        let mut out = Vec::new();
        for (j, unit) in self.units_at(leaf).iter().enumerate() {
            let mut length = None;
            let mut card = 0u64;
            for &e in &unit.edges {
                let edge = self.hg.edge(e)?;
                if edge.end != leaf {
                    return Err(CalcError::Inconsistent(format!("unit {j} at {leaf}: {e} ends at {}", edge.end)));
                }
                let size = self.hg.edge_size(e)?;
                if *length.get_or_insert(size) != size {
                    return Err(CalcError::Inconsistent(format!("unit {j} at {leaf} mixes edge sizes")));
                }
                card += edge.mult;
            }
            let length = length.ok_or_else(|| CalcError::Inconsistent(format!("unit {j} at {leaf} is empty")))?;
            if !card.is_power_of_two() {
                return Err(CalcError::Inconsistent(format!("unit {j} at {leaf} has cardinality {card}")));
            }
            let shape = UnitShape {
                length,
                power: unit.power,
                card_log: card.trailing_zeros(),
            };
            if !shape.holds_invariant(self.log_d) {
                return Err(CalcError::Inconsistent(format!("unit {j} at {leaf}: {shape:?}")));
            }
            out.push(shape);
        }
        Ok(out)
    }

    fn reserve(&self, extra: usize) -> Result<(), CalcError> {
        if (self.hg.vertex_count() + extra) as u64 > self.budget {
            Err(CalcError::TooLarge { budget: self.budget })
        } else {
            Ok(())
        }
    }

    /// Splits a unit's records into two halves of equal total multiplicity,
    /// in edge-id order, cutting one record in two when needed.
    fn halve_edges(&mut self, edges: &[EdgeId], index: usize) -> Result<(Vec<EdgeId>, Vec<EdgeId>), CalcError> {
        let mut total = 0u64;
        for &e in edges {
            total += self.hg.edge(e)?.mult;
        }
        if total < 2 || total % 2 == 1 {
            return Err(CalcError::SingletonUnit(index));
        }
        let mut need = total / 2;
        let (mut first, mut second) = (Vec::new(), Vec::new());
        for &e in edges {
            let edge = *self.hg.edge(e)?;
            if need == 0 {
                second.push(e);
            } else if edge.mult <= need {
                need -= edge.mult;
                first.push(e);
            } else {
                self.hg.edge_mut(e)?.mult = need;
                let rest = self.hg.push_edge_unchecked(PathEdge {
                    mult: edge.mult - need,
                    ..edge
                });
                need = 0;
                first.push(e);
                second.push(rest);
            }
        }
        Ok((first, second))
    }

    /// One split of a leaf following `plan`; returns the two children.
    pub fn split_leaf(&mut self, u: VertexId, plan: &SplitPlan) -> Result<[VertexId; 2], CalcError> {
        if !self.hg.is_leaf(u)? {
            return Err(CalcError::NotALeaf(u));
        }
        let units = self.units.get(&u).cloned().unwrap_or_default();
        if plan.routes.len() != units.len() {
            return Err(CalcError::ShapeMismatch(format!(
                "split plan has {} routes for {} units",
                plan.routes.len(),
                units.len()
            )));
        }
        for (j, (unit, route)) in units.iter().zip(&plan.routes).enumerate() {
            if *route == Route::Halve {
                let card: u64 = unit.edges.iter().map(|&e| self.hg.edge(e).map(|x| x.mult)).sum::<Result<_, _>>()?;
                if card < 2 {
                    return Err(CalcError::SingletonUnit(j));
                }
            }
        }
        self.reserve(2)?;
        let mut parts: [Vec<EdgeId>; 2] = [Vec::new(), Vec::new()];
        let mut child_units: [Vec<Unit>; 2] = [Vec::new(), Vec::new()];
        for (j, (unit, route)) in units.iter().zip(&plan.routes).enumerate() {
            match route {
                Route::First | Route::Second => {
                    let side = usize::from(*route == Route::Second);
                    parts[side].extend(&unit.edges);
                    child_units[side].push(Unit {
                        edges: unit.edges.clone(),
                        power: unit.power + 1,
                    });
                }
                Route::Halve => {
                    let (a, b) = self.halve_edges(&unit.edges, j)?;
                    parts[0].extend(&a);
                    parts[1].extend(&b);
                    child_units[0].push(Unit { edges: a, power: unit.power });
                    child_units[1].push(Unit { edges: b, power: unit.power });
                }
                Route::Drop => {}
            }
        }
        let d = 1u64 << self.log_d;
        let singles = if plan.singletons { [Some(d), Some(d)] } else { [None, None] };
        let out = split_node(&mut self.hg, u, [&parts[0], &parts[1]], singles)?;
        self.units.remove(&u);
        let (a, b) = out.children;
        for ((child, mut list), single) in [a, b].into_iter().zip(child_units).zip(out.singletons) {
            if let Some(s) = single {
                list.insert(0, Unit { edges: vec![s], power: 0 });
            }
            self.units.insert(child, list);
        }
        Ok([a, b])
    }

    /// The split of the increase lemma: halves of every unit to both
    /// children plus singletons of multiplicity `d`.
    pub fn unit_increase_split(&mut self, u: VertexId) -> Result<[VertexId; 2], CalcError> {
        let profile = self.measure(u)?;
        for (j, s) in profile.iter().enumerate() {
            if s.length > self.log_d + s.power {
                return Err(CalcError::UnitTooLong {
                    index: j,
                    length: s.length,
                    max: self.log_d + s.power,
                });
            }
        }
        self.split_leaf(u, &SplitPlan::increase(profile.len()))
    }

    /// Extends below `u`, whose units must all have length at most `r`,
    /// by `s - r` rounds of unit-increase splits.
    pub fn extend_staircase(&mut self, u: VertexId, r: u32, s: u32) -> Result<Vec<VertexId>, CalcError> {
        if r > s || s > self.log_d + 1 {
            return Err(CalcError::OutOfRange {
                what: "staircase bounds r <= s <= log d + 1",
                value: s.into(),
            });
        }
        for (j, shape) in self.measure(u)?.iter().enumerate() {
            if shape.length > r {
                return Err(CalcError::UnitTooLong {
                    index: j,
                    length: shape.length,
                    max: r,
                });
            }
        }
        self.extend(&vec![u], s - r)
    }

    /// Merges the units at `indices` of leaf `u` (others dropped).
    pub fn merge_units(&mut self, u: VertexId, indices: &[usize]) -> Result<Vec<Vec<VertexId>>, CalcError> {
        self.select(u, indices)?;
        self.merge(&vec![u], indices.len())
    }

    /// Halves unit `unit` of leaf `u` (others dropped).
    pub fn halve_unit(&mut self, u: VertexId, unit: usize) -> Result<Vec<VertexId>, CalcError> {
        self.halve(&vec![u], unit)
    }

    fn select(&mut self, u: VertexId, indices: &[usize]) -> Result<(), CalcError> {
        let list = self.units.get(&u).cloned().unwrap_or_default();
        let mut chosen = Vec::with_capacity(indices.len());
        let mut seen = HashSet::new();
        for &j in indices {
            let unit = list.get(j).ok_or(CalcError::NoSuchUnit { index: j, len: list.len() })?;
            if !seen.insert(j) {
                return Err(CalcError::ShapeMismatch(format!("unit {j} selected twice")));
            }
            chosen.push(unit.clone());
        }
        self.units.insert(u, chosen);
        Ok(())
    }

    /// Collapses every current non-terminal leaf.
    pub fn collapse_to_uniform(&mut self, target: u32) -> Result<(), CalcError> {
        let leaves: Vec<VertexId> = self.leaves().into_iter().filter(|v| !self.is_terminal(*v)).collect();
        for leaf in leaves {
            self.collapse(&vec![leaf], target)?;
        }
        Ok(())
    }

    /// The hypergraph without dead edges: only the final edge of every
    /// terminal leaf survives.
    pub fn finalize(&self) -> TreeHypergraph {
        let live: HashSet<EdgeId> = self
            .terminal
            .iter()
            .flat_map(|leaf| self.units_at(*leaf).iter().flat_map(|u| u.edges.iter().copied()))
            .collect();
        let mut h = self.hg.clone();
        h.retain_edges(|e, _| live.contains(&e));
        h
    }
}

impl UnitBackend for UnitTree {
    type Group = Vec<VertexId>;

    fn log_d(&self) -> u32 {
        self.log_d
    }

    fn profile(&self, g: &Self::Group) -> Result<Vec<UnitShape>, CalcError> {
        let first = g
            .first()
            .ok_or_else(|| CalcError::ShapeMismatch("empty group".into()))?;
        let p = self.measure(*first)?;
        for &leaf in &g[1..] {
            if self.measure(leaf)? != p {
                return Err(CalcError::Inconsistent(format!("{leaf} differs from {first}")));
            }
        }
        Ok(p)
    }

    fn split(&mut self, g: &Self::Group, plan: &SplitPlan) -> Result<[Self::Group; 2], CalcError> {
        super::unit::split_profile(&self.profile(g)?, plan, self.log_d)?;
        let mut out = [Vec::with_capacity(g.len()), Vec::with_capacity(g.len())];
        for &leaf in g {
            let [a, b] = self.split_leaf(leaf, plan)?;
            out[0].push(a);
            out[1].push(b);
        }
        Ok(out)
    }

    fn repartition(&mut self, g: &Self::Group) -> Result<(), CalcError> {
        super::unit::repartition_profile(&self.profile(g)?)?;
        for &leaf in g {
            let list = self.units.remove(&leaf).unwrap_or_default();
            let mut next = Vec::with_capacity(list.len() * 2);
            for (j, unit) in list.into_iter().enumerate() {
                let (a, b) = self.halve_edges(&unit.edges, j)?;
                next.push(Unit { edges: a, power: unit.power - 1 });
                next.push(Unit { edges: b, power: unit.power - 1 });
            }
            self.units.insert(leaf, next);
        }
        Ok(())
    }

    fn sort_by_length(&mut self, g: &Self::Group) -> Result<(), CalcError> {
        for &leaf in g {
            let shapes = self.measure(leaf)?;
            let Some(list) = self.units.get_mut(&leaf) else {
                continue;
            };
            let mut keyed: Vec<(u32, Unit)> = shapes.iter().map(|s| s.length).zip(list.drain(..)).collect();
            keyed.sort_by_key(|(len, _)| *len);
            list.extend(keyed.into_iter().map(|(_, u)| u));
        }
        Ok(())
    }

    fn truncate(&mut self, g: &Self::Group, keep: usize) -> Result<(), CalcError> {
        for leaf in g {
            if let Some(list) = self.units.get_mut(leaf) {
                list.truncate(keep);
            }
        }
        Ok(())
    }

    fn extend(&mut self, g: &Self::Group, rounds: u32) -> Result<Self::Group, CalcError> {
        extend_profile(&self.profile(g)?, rounds, self.log_d)?;
        let mut current = g.clone();
        for _ in 0..rounds {
            let mut next = Vec::with_capacity(current.len() * 2);
            for leaf in current {
                let count = self.units_at(leaf).len();
                next.extend(self.split_leaf(leaf, &SplitPlan::increase(count))?);
            }
            current = next;
        }
        Ok(current)
    }

    fn merge(&mut self, g: &Self::Group, count: usize) -> Result<Vec<Self::Group>, CalcError> {
        let profile = self.profile(g)?;
        check_merge(&profile, count)?;
        let rounds = count.trailing_zeros();
        let mut groups: Vec<Self::Group> = vec![Vec::with_capacity(g.len()); count];
        for &leaf in g {
            self.units.get_mut(&leaf).expect("profiled leaf").truncate(count);
            let mut frontier = vec![(leaf, 0usize)];
            for r in 0..rounds {
                let half = count >> (r + 1);
                let mut next = Vec::with_capacity(frontier.len() * 2);
                for (v, lo) in frontier {
                    let [a, b] = self.split_leaf(v, &SplitPlan::cut(2 * half, half))?;
                    next.push((a, lo));
                    next.push((b, lo + half));
                }
                frontier = next;
            }
            for (v, j) in frontier {
                groups[j].push(v);
            }
        }
        Ok(groups)
    }

    fn halve(&mut self, g: &Self::Group, unit: usize) -> Result<Self::Group, CalcError> {
        let profile = self.profile(g)?;
        let plan = halve_plan(&profile, unit)?;
        let [a, b] = self.split(g, &plan)?;
        Ok(interleave(a, b))
    }

    fn collapse(&mut self, g: &Self::Group, target: u32) -> Result<(), CalcError> {
        let plan = collapse_plan(&self.profile(g)?, target)?;
        for &leaf in g {
            self.select(leaf, &plan.indices)?;
        }
        for group in self.merge(g, plan.indices.len())? {
            let mut current = group;
            while self.profile(&current)?[0].card_log > 0 {
                current = self.halve(&current, 0)?;
            }
            self.terminal.extend(current);
        }
        Ok(())
    }

    fn mark(&mut self, _g: &Self::Group, _tag: &str, _frozen: bool) {}

    fn leaf_count_log2(&self, g: &Self::Group) -> f64 {
        (g.len() as f64).log2()
    }

    fn max_degree(&self) -> BigUint {
        BigUint::from(self.hg.max_degree())
    }

    fn vertex_count_log2(&self) -> f64 {
        (self.hg.vertex_count() as f64).log2()
    }

    fn all_terminal(&self) -> bool {
        self.hg.leaves().all(|v| self.terminal.contains(&v))
    }

    fn snapshot(&self) -> BackendSnapshot {
        let mut profiles: BTreeMap<Vec<UnitShape>, BigUint> = BTreeMap::new();
        let mut leaves = 0u64;
        for leaf in self.hg.leaves() {
            leaves += 1;
            let p = self.measure(leaf).expect("backend keeps its units consistent");
            *profiles.entry(p).or_default() += 1u32;
        }
        BackendSnapshot {
            profiles,
            max_degree: self.max_degree(),
            vertices: BigUint::from(self.hg.vertex_count()),
            leaves: BigUint::from(leaves),
            covered: audit_branches(&self.hg).every_branch_covered,
        }
    }
}

pub(crate) fn check_merge(profile: &[UnitShape], count: usize) -> Result<(), CalcError> {
    if !count.is_power_of_two() {
        return Err(CalcError::NotPowerOfTwo(count));
    }
    if count > profile.len() {
        return Err(CalcError::NoSuchUnit {
            index: count - 1,
            len: profile.len(),
        });
    }
    if profile[..count].iter().any(|u| u.power != profile[0].power) {
        return Err(CalcError::MixedPower);
    }
    Ok(())
}

pub(crate) fn halve_plan(profile: &[UnitShape], unit: usize) -> Result<SplitPlan, CalcError> {
    let shape = profile.get(unit).ok_or(CalcError::NoSuchUnit {
        index: unit,
        len: profile.len(),
    })?;
    if shape.card_log == 0 {
        return Err(CalcError::SingletonUnit(unit));
    }
    Ok(SplitPlan {
        routes: (0..profile.len())
            .map(|j| if j == unit { Route::Halve } else { Route::Drop })
            .collect(),
        singletons: false,
    })
}

fn interleave(a: Vec<VertexId>, b: Vec<VertexId>) -> Vec<VertexId> {
    a.into_iter().zip(b).flat_map(|(x, y)| [x, y]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_node_cases() {
        let mut h = TreeHypergraph::new();
        let r = h.add_vertex(None).unwrap();
        let e1 = h.add_path_edge(r, r, 1).unwrap();
        let e2 = h.add_path_edge(r, r, 1).unwrap();
        let out = split_node(&mut h, r, [&[e1], &[e2]], [None, None]).unwrap();
        let (a, b) = out.children;
        assert_eq!(h.edge(e1).unwrap().end, a);
        assert_eq!(h.edge(e2).unwrap().end, b);
        let out = split_node(&mut h, a, [&[], &[]], [Some(4), Some(4)]).unwrap();
        let s = out.singletons[0].unwrap();
        assert_eq!(h.edge_size(s).unwrap(), 1);
        assert_eq!(h.edge(s).unwrap().mult, 4);
        assert_eq!(
            split_node(&mut h, b, [&[e1], &[]], [None, None]).unwrap_err(),
            CalcError::NotAPartition(e1)
        );
        assert_eq!(
            split_node(&mut h, b, [&[e2], &[e2]], [None, None]).unwrap_err(),
            CalcError::NotAPartition(e2)
        );
        assert_eq!(split_node(&mut h, r, [&[], &[]], [None, None]).unwrap_err(), CalcError::NotALeaf(r));
    }

    #[test]
    fn lemma_first_figure() {
        let (t, leaves) = UnitTree::lemma_first(2, 1 << 10).unwrap();
        let h = t.hypergraph();
        assert_eq!(h.vertex_count(), 7);
        for leaf in &leaves {
            let sizes: Vec<(u32, u64)> = t.units_at(*leaf)
                .iter()
                .map(|u| (h.edge_size(u.edges[0]).unwrap(), h.edge(u.edges[0]).unwrap().mult))
                .collect();
            assert_eq!(sizes, vec![(3, 1), (2, 2), (1, 4)]);
        }
        for v in h.vertices() {
            let starts: u64 = h.edges().iter().filter(|e| e.start == v).map(|e| e.mult).sum();
            assert_eq!(starts, 4);
        }
        assert!(h.max_degree() <= 8);
    }

    #[test]
    fn increase_split_degree_bound() {
        let (mut t, leaves) = UnitTree::lemma_first(3, 1 << 10).unwrap();
        let u = leaves[0];
        let before = t.hypergraph().degree(u).unwrap();
        // the length-4 unit is a single edge, so first do a split that is legal
        let err = t.unit_increase_split(u).unwrap_err();
        assert_eq!(err.kind(), "UnitTooLong");
        t.truncate(&vec![u], 0).unwrap();
        let [a, b] = t.unit_increase_split(u).unwrap();
        for c in [a, b] {
            assert!(t.hypergraph().degree(c).unwrap() <= 8 + before / 2);
            assert_eq!(t.measure(c).unwrap(), vec![UnitShape { length: 1, power: 0, card_log: 3 }]);
        }
    }

    #[test]
    fn halve_to_singleton() {
        let (mut t, root) = UnitTree::root(2, 1 << 10).unwrap();
        let leaves = t.extend(&root, 1).unwrap();
        let u = leaves[0];
        // length-1 unit of power 0 has cardinality 4
        let kids = t.halve_unit(u, 0).unwrap();
        assert_eq!(t.measure(kids[0]).unwrap(), vec![UnitShape { length: 2, power: 0, card_log: 1 }]);
        let kids = t.halve_unit(kids[0], 0).unwrap();
        assert_eq!(t.measure(kids[0]).unwrap(), vec![UnitShape { length: 3, power: 0, card_log: 0 }]);
        assert_eq!(t.halve_unit(kids[0], 0).unwrap_err(), CalcError::SingletonUnit(0));
    }
}
