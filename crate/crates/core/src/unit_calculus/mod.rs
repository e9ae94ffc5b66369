//! Units of bottom hyperedges and the operations that grow trees around them.
//!
//! Fix `L = log d`. A unit of power `k` is a set of `2^i` bottom hyperedges
//! (multiplicity counted) of common size `L + 1 - i + k` ending at one leaf.
//! The size is the unit's *length*, so every unit satisfies
//! `length + log(cardinality) = L + 1 + power`.
//!
//! Two interchangeable backends implement [`UnitBackend`]:
//!
//! * [`explicit::UnitTree`] materializes the tree and its edges,
//! * [`symbolic::SymbolicTree`] keeps one [`symbolic::LeafClass`] per set of
//!   leaves sharing a history, with exact big-integer counts and degrees.
//!
//! Pipelines ([`weak`], [`strong`], [`pipeline`]) are written once against the
//! trait and run on either backend.

pub mod backend;
pub mod explicit;
pub mod pipeline;
pub mod report;
pub mod strong;
pub mod symbolic;
pub mod unit;
pub mod weak;

pub use backend::{BackendSnapshot, UnitBackend};
pub use explicit::{split_node, SplitOutcome, UnitTree};
pub use report::{Inequality, Q, StrongReport};
pub use strong::{build_strong, symbolic_run, Backend, Mode, StrongParams};
pub use symbolic::{LeafClass, SymbolicTree};
pub use unit::{collapse_plan, split_profile, CollapsePlan, Route, SplitPlan, UnitShape};
pub use weak::build_weak;

use thiserror::Error;

use crate::tree::{EdgeId, TreeError, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CalcError {
    #[error("{0} is not a leaf")]
    NotALeaf(VertexId),
    #[error("edge {0} is listed twice or does not end at the split vertex")]
    NotAPartition(EdgeId),
    #[error("unit {index} has length {length}, above the allowed {max}")]
    UnitTooLong { index: usize, length: u32, max: u32 },
    #[error("{what} = {value} is out of range")]
    OutOfRange { what: &'static str, value: i64 },
    #[error("{0} units selected, not a power of two")]
    NotPowerOfTwo(usize),
    #[error("selected units do not share one power")]
    MixedPower,
    #[error("unit {0} has a single hyperedge and cannot be halved")]
    SingletonUnit(usize),
    #[error("unit {0} has power 0 and cannot be repartitioned")]
    PowerUnderflow(usize),
    #[error("unit index {index} out of range for a profile of {len}")]
    NoSuchUnit { index: usize, len: usize },
    #[error("no power k <= {target} has 2^({target}-k) units (best margin {margin})")]
    InsufficientUnits { target: u32, margin: i64 },
    #[error("property P fails: {0}")]
    PropertyPViolation(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("inequality {0} fails")]
    CheckFailed(String),
    #[error("needs more than {budget} vertices")]
    TooLarge { budget: u64 },
    #[error("materialized tree breaks the unit invariant: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

impl CalcError {
    /// Variant name, used to compare failures across backends.
    pub fn kind(&self) -> &'static str {
        match self {
            CalcError::NotALeaf(_) => "NotALeaf",
            CalcError::NotAPartition(_) => "NotAPartition",
            CalcError::UnitTooLong { .. } => "UnitTooLong",
            CalcError::OutOfRange { .. } => "OutOfRange",
            CalcError::NotPowerOfTwo(_) => "NotPowerOfTwo",
            CalcError::MixedPower => "MixedPower",
            CalcError::SingletonUnit(_) => "SingletonUnit",
            CalcError::PowerUnderflow(_) => "PowerUnderflow",
            CalcError::NoSuchUnit { .. } => "NoSuchUnit",
            CalcError::InsufficientUnits { .. } => "InsufficientUnits",
            CalcError::PropertyPViolation(_) => "PropertyPViolation",
            CalcError::ShapeMismatch(_) => "ShapeMismatch",
            CalcError::CheckFailed(_) => "CheckFailed",
            CalcError::TooLarge { .. } => "TooLarge",
            CalcError::Inconsistent(_) => "Inconsistent",
            CalcError::Tree(_) => "Tree",
        }
    }
}
