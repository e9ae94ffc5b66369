//! The extremal binary-tree hypergraph and the neighborhood counterexample.

use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::explicit_budget;
use crate::unit_calculus::strong::{build_strong_with_budget, StrongBuild};
use crate::unit_calculus::weak::build_weak_with_budget;
use crate::unit_calculus::{Backend, CalcError};
use crate::tree::{EdgeId, TreeHypergraph, VertexId};

pub const ES_MAX_N: u32 = 24;
pub const THEOREM1_MAX_N: u32 = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("{what} = {value} is outside {min}..={max}")]
    OutOfRange {
        what: &'static str,
        value: u64,
        min: u64,
        max: u64,
    },
    #[error("construction needs {vertices} vertices, budget is {budget}")]
    TooLarge { vertices: u128, budget: u64 },
    #[error("edge {edge} starts on level {level}, which no counterexample edge does")]
    NotACounterexampleShape { edge: EdgeId, level: u32 },
}

fn check_range(what: &'static str, value: u32, min: u32, max: u32) -> Result<(), ConstructionError> {
    if (min..=max).contains(&value) {
        Ok(())
    } else {
        Err(ConstructionError::OutOfRange {
            what,
            value: value.into(),
            min: min.into(),
            max: max.into(),
        })
    }
}

/// Hangs a complete binary tree with `levels` levels below `top` (which
/// becomes its root) and returns its leaves from left to right.
fn attach_complete(h: &mut TreeHypergraph, top: VertexId, levels: u32) -> Vec<VertexId> {
    let mut frontier = vec![top];
    for _ in 1..levels {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for v in frontier {
            let (a, b) = h.add_children(v).expect("frontier vertices are leaves");
            next.push(a);
            next.push(b);
        }
        frontier = next;
    }
    frontier
}

/// Complete binary tree with `n` levels, one edge per full branch.
pub fn es_extremal_tree(n: u32) -> Result<TreeHypergraph, ConstructionError> {
    check_range("n", n, 2, ES_MAX_N)?;
    let mut h = TreeHypergraph::with_target(n);
    let root = h.add_vertex(None).expect("empty tree");
    for leaf in attach_complete(&mut h, root, n) {
        h.add_path_edge(root, leaf, 1).expect("root is an ancestor");
    }
    Ok(h)
}

/// Number of vertices of [`theorem1_counterexample`] for `n`.
pub fn theorem1_vertex_count(n: u32) -> u128 {
    let p = |k: u32| 1u128 << k;
    p(n - 1) - 1 + p(n - 2) * (p(n - 2) + p(2 * n - 4))
}

pub fn theorem1_counterexample(n: u32) -> Result<TreeHypergraph, ConstructionError> {
    theorem1_counterexample_with_budget(n, explicit_budget())
}

/// The `n`-uniform hypergraph with maximum neighborhood `3 * 2^(n-3)` on
/// which Maker wins by walking down the tree.
///
/// A tree `T'` with `n-1` levels; below each leaf `u` children `v` (the
/// branch to `v` is an edge) and `w`; below `w` a tree `S` with `n-2`
/// levels; below each leaf `u'` of `S` children `v'` (the path `u -> v'` is
/// an edge) and `w'`; below `w'` a tree `S'` with `n-1` levels whose
/// leaves all end edges starting at `u'`.
pub fn theorem1_counterexample_with_budget(n: u32, budget: u64) -> Result<TreeHypergraph, ConstructionError> {
    check_range("n", n, 4, THEOREM1_MAX_N)?;
    let vertices = theorem1_vertex_count(n);
    if vertices > budget as u128 {
        return Err(ConstructionError::TooLarge { vertices, budget });
    }
    let mut h = TreeHypergraph::with_target(n);
    let root = h.add_vertex(None).expect("empty tree");
    for u in attach_complete(&mut h, root, n - 1) {
        let (v, w) = h.add_children(u).expect("leaf of T'");
        h.add_path_edge(root, v, 1).expect("branch edge");
        for u1 in attach_complete(&mut h, w, n - 2) {
            let (v1, w1) = h.add_children(u1).expect("leaf of S");
            h.add_path_edge(u, v1, 1).expect("u is above v'");
            for leaf in attach_complete(&mut h, w1, n - 1) {
                h.add_path_edge(u1, leaf, 1).expect("u' is above S'");
            }
        }
    }
    Ok(h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartClass {
    Root,
    /// Start on level `n-2` (the vertices `u`).
    LevelNMinus2,
    /// Start on level `2n-4` (the vertices `u'`).
    Level2NMinus4,
}

impl StartClass {
    pub fn label(self) -> &'static str {
        match self {
            StartClass::Root => "root",
            StartClass::LevelNMinus2 => "level n-2",
            StartClass::Level2NMinus4 => "level 2n-4",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub class: StartClass,
    pub start_level: u32,
    pub edges_in_class: u64,
    pub min_neighborhood: u64,
    pub max_neighborhood: u64,
    /// Count stated in the case analysis for this class.
    pub claimed: u64,
    /// Upper bound asserted for this class, if any.
    pub bound: Option<u64>,
    pub within_bound: bool,
}

/// Exact exclude-self neighborhood counts per start-level class.
pub fn neighborhood_census(h: &TreeHypergraph) -> Result<Vec<CensusRow>, ConstructionError> {
    let n = h
        .uniform_size()
        .or(h.uniformity_target())
        .ok_or(ConstructionError::OutOfRange {
            what: "uniform edge size",
            value: 0,
            min: 4,
            max: THEOREM1_MAX_N.into(),
        })?;
    check_range("n", n, 4, THEOREM1_MAX_N)?;
    let p = |k: u32| 1u64 << k;
    let classes = [
        (StartClass::Root, 0, p(n - 2) + p(n - 3) - 1, Some(p(n - 2) + p(n - 3) - 1)),
        (StartClass::LevelNMinus2, n - 2, p(n - 2) + p(n - 3), Some(p(n - 2) + p(n - 3))),
        (StartClass::Level2NMinus4, 2 * n - 4, p(n - 2) + 1, None),
    ];
    let mut stats: Vec<(u64, u64, u64)> = vec![(0, u64::MAX, 0); 3];
    for (e, size) in h.edge_ids().zip(h.neighborhood_sizes()) {
        let level = h
            .level(h.edge(e).expect("listed edge").start)
            .map_err(|_| ConstructionError::NotACounterexampleShape { edge: e, level: u32::MAX })?;
        let slot = classes
            .iter()
            .position(|c| c.1 == level)
            .ok_or(ConstructionError::NotACounterexampleShape { edge: e, level })?;
        let size = size.map_err(|_| ConstructionError::NotACounterexampleShape { edge: e, level })?;
        let s = &mut stats[slot];
        s.0 += 1;
        s.1 = s.1.min(size);
        s.2 = s.2.max(size);
    }
    Ok(classes
        .iter()
        .zip(stats)
        .map(|(&(class, start_level, claimed, bound), (count, min, max))| CensusRow {
            class,
            start_level,
            edges_in_class: count,
            min_neighborhood: if count == 0 { 0 } else { min },
            max_neighborhood: max,
            claimed,
            bound,
            within_bound: bound.is_none_or(|b| max <= b),
        })
        .collect())
}

/// The named constructions, as accepted by the command line and the game
/// service.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Es,
    Theorem1,
    Weak,
    Strong,
}

impl Construction {
    pub fn name(self) -> &'static str {
        match self {
            Construction::Es => "es",
            Construction::Theorem1 => "theorem1",
            Construction::Weak => "weak",
            Construction::Strong => "strong",
        }
    }
}

impl FromStr for Construction {
    type Err = BuildError;

    fn from_str(s: &str) -> Result<Self, BuildError> {
        match s {
            "es" => Ok(Construction::Es),
            "theorem1" => Ok(Construction::Theorem1),
            "weak" => Ok(Construction::Weak),
            "strong" => Ok(Construction::Strong),
            other => Err(BuildError::UnknownConstruction(other.to_string())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("unknown construction {0:?} (expected es, theorem1, weak or strong)")]
    UnknownConstruction(String),
    #[error("the strong construction needs a constant c")]
    MissingConstant,
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Calc(#[from] CalcError),
}

/// Builds a construction explicitly within `budget` vertices. The strong
/// one uses the explicit backend in strict mode.
pub fn build_construction(kind: Construction, n: u32, c: Option<Ratio<i64>>, budget: u64) -> Result<TreeHypergraph, BuildError> {
    match kind {
        Construction::Es => {
            check_range("n", n, 2, ES_MAX_N)?;
            let vertices = (1u128 << n) - 1;
            if vertices > budget as u128 {
                return Err(ConstructionError::TooLarge { vertices, budget }.into());
            }
            Ok(es_extremal_tree(n)?)
        }
        Construction::Theorem1 => Ok(theorem1_counterexample_with_budget(n, budget)?),
        Construction::Weak => Ok(build_weak_with_budget(n, budget)?),
        Construction::Strong => {
            let c = c.ok_or(BuildError::MissingConstant)?;
            match build_strong_with_budget(n, c, Backend::Explicit, budget)? {
                StrongBuild::Explicit { hypergraph, .. } => Ok(hypergraph),
                StrongBuild::Symbolic(_) => unreachable!("explicit backend requested"),
            }
        }
    }
}
