use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::Serialize;

use super::unit::UnitShape;
use super::CalcError;

/// Observable state compared across backends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BackendSnapshot {
    /// Leaf count per bottom profile (terminal leaves included).
    pub profiles: BTreeMap<Vec<UnitShape>, BigUint>,
    /// Largest degree any vertex had when it was created.
    pub max_degree: BigUint,
    pub vertices: BigUint,
    pub leaves: BigUint,
    /// Every full branch contains some edge (dead edges included).
    pub covered: bool,
}

/// Operations on groups of leaves that share one bottom profile.
///
/// Groups are consumed by the operations that add vertices below them; the
/// returned groups cover exactly the new leaves.
pub trait UnitBackend {
    type Group: Clone + std::fmt::Debug;

    fn log_d(&self) -> u32;

    /// Profile common to the group's leaves.
    fn profile(&self, g: &Self::Group) -> Result<Vec<UnitShape>, CalcError>;

    /// One node split per leaf.
    fn split(&mut self, g: &Self::Group, plan: &super::SplitPlan) -> Result<[Self::Group; 2], CalcError>;

    /// Every unit replaced by two units of one power less and equal length.
    fn repartition(&mut self, g: &Self::Group) -> Result<(), CalcError>;

    /// Stable reorder of the profile by ascending length.
    fn sort_by_length(&mut self, g: &Self::Group) -> Result<(), CalcError>;

    /// Keeps the first `keep` units; the others stay as dead edges.
    fn truncate(&mut self, g: &Self::Group, keep: usize) -> Result<(), CalcError>;

    /// `rounds` unit-increase splits below every leaf.
    fn extend(&mut self, g: &Self::Group, rounds: u32) -> Result<Self::Group, CalcError>;

    /// Merges the first `count` units (a power of two, all of one power) into
    /// one unit of power `k + log count` per branch; returns one group per
    /// merged unit, in profile order.
    fn merge(&mut self, g: &Self::Group, count: usize) -> Result<Vec<Self::Group>, CalcError>;

    /// Splits once so that both children carry half of unit `unit`; the
    /// other units are dropped.
    fn halve(&mut self, g: &Self::Group, unit: usize) -> Result<Self::Group, CalcError>;

    /// Turns every branch below the group into a branch ending one edge of
    /// size `log d + 1 + target`.
    fn collapse(&mut self, g: &Self::Group, target: u32) -> Result<(), CalcError>;

    fn mark(&mut self, g: &Self::Group, tag: &str, frozen: bool);

    /// `log2` of the group's leaf count.
    fn leaf_count_log2(&self, g: &Self::Group) -> f64;

    /// Largest creation-time vertex degree so far.
    fn max_degree(&self) -> BigUint;

    /// `log2` of the vertex count so far.
    fn vertex_count_log2(&self) -> f64;

    /// Every current leaf ends a collapsed branch.
    fn all_terminal(&self) -> bool;

    fn snapshot(&self) -> BackendSnapshot;
}
