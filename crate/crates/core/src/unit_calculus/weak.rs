//! The weak pipeline: degree `2^(n+1)/n` with `d = 2^n/n`.
//!
//! Three stages, written against [`UnitBackend`]:
//!
//! 1. the complete tree of [`UnitTree::lemma_first`], whose branches end
//!    units of cardinality `2^i` and length `L + 1 - i` for `i = 0..=L`,
//! 2. a complete tree of height `h = floor(log L)` below every leaf, routing
//!    unit `i` to the `i`-th new leaf (units `i >= 2^h` become dead),
//! 3. a complete tree of height `i` below a leaf carrying unit `i`, one edge
//!    per branch, of final size `L + 1 + h = n`.

use num_bigint::BigUint;
use serde::Serialize;

use super::backend::{BackendSnapshot, UnitBackend};
use super::explicit::UnitTree;
use super::symbolic::SymbolicTree;
use super::unit::UnitShape;
use super::CalcError;
use crate::budget::explicit_budget;
use crate::tree::{TreeHypergraph, VertexId};

/// Sizes the weak construction is defined for.
pub const WEAK_SIZES: [u32; 3] = [4, 8, 16];

/// `(L, h)` for `d = 2^n / n`, checking `L + 1 + h = n`.
pub fn weak_params(n: u32) -> Result<(u32, u32), CalcError> {
    if !WEAK_SIZES.contains(&n) {
        return Err(CalcError::OutOfRange {
            what: "weak n",
            value: n.into(),
        });
    }
    let log_d = n - n.ilog2();
    let h = log_d.ilog2();
    if log_d + 1 + h != n {
        return Err(CalcError::ShapeMismatch(format!("log d + 1 + floor(log log d) = {} != {n}", log_d + 1 + h)));
    }
    Ok((log_d, h))
}

fn lemma_first_profile(log_d: u32) -> Vec<UnitShape> {
    (0..=log_d)
        .map(|i| UnitShape {
            length: log_d + 1 - i,
            power: 0,
            card_log: i,
        })
        .collect()
}

/// Explicit first stage for `d = 2^log_d`.
pub fn weak_lemma_first(log_d: u32, budget: u64) -> Result<(UnitTree, Vec<VertexId>), CalcError> {
    UnitTree::lemma_first(log_d, budget)
}

/// Second stage: routes the first `2^h` units, one per new branch.
pub fn weak_attach_power<B: UnitBackend>(b: &mut B, g: &B::Group, h: u32) -> Result<Vec<B::Group>, CalcError> {
    let profile = b.profile(g)?;
    if profile != lemma_first_profile(b.log_d()) {
        return Err(CalcError::ShapeMismatch("attach_power expects a lemma-first profile".into()));
    }
    let count = 1usize << h;
    if count > profile.len() {
        return Err(CalcError::ShapeMismatch(format!("{count} branches for {} units", profile.len())));
    }
    b.merge(g, count)
}

/// Third stage: every group must hold one unit of power `h`, which is
/// halved down to single edges of size `L + 1 + h`.
pub fn weak_equalize<B: UnitBackend>(b: &mut B, groups: &[B::Group], h: u32) -> Result<(), CalcError> {
    for g in groups {
        let profile = b.profile(g)?;
        if profile.len() != 1 || profile[0].power != h {
            return Err(CalcError::ShapeMismatch(format!("equalize expects one unit of power {h}, found {profile:?}")));
        }
        b.collapse(g, h)?;
    }
    Ok(())
}

/// Stages two and three on a backend that already holds the first stage.
pub fn weak_pipeline<B: UnitBackend>(b: &mut B, g: &B::Group, h: u32) -> Result<(), CalcError> {
    let groups = weak_attach_power(b, g, h)?;
    weak_equalize(b, &groups, h)
}

/// Degree bound check shared by both backends.
fn check_degree<B: UnitBackend>(b: &B) -> Result<(), CalcError> {
    let two_d = BigUint::from(1u32) << (b.log_d() + 1);
    if b.max_degree() > two_d {
        return Err(CalcError::CheckFailed(format!("max degree {} > 2d = {two_d}", b.max_degree())));
    }
    Ok(())
}

/// The weak construction for `n` in {4, 8, 16}, dead edges removed.
pub fn build_weak(n: u32) -> Result<TreeHypergraph, CalcError> {
    build_weak_with_budget(n, explicit_budget())
}

pub fn build_weak_with_budget(n: u32, budget: u64) -> Result<TreeHypergraph, CalcError> {
    let (log_d, h) = weak_params(n)?;
    let (mut t, leaves) = weak_lemma_first(log_d, budget)?;
    let mut groups = Vec::with_capacity(leaves.len());
    for leaf in leaves {
        groups.extend(weak_attach_power(&mut t, &vec![leaf], h)?);
    }
    weak_equalize(&mut t, &groups, h)?;
    check_degree(&t)?;
    let mut out = t.finalize();
    out.set_uniformity_target(Some(n));
    Ok(out)
}

/// Outcome of the weak pipeline on the symbolic backend.
#[derive(Clone, Debug, Serialize)]
pub struct WeakSymbolic {
    pub n: u32,
    pub log_d: u32,
    pub h: u32,
    pub snapshot: BackendSnapshot,
}

pub fn weak_symbolic(n: u32) -> Result<WeakSymbolic, CalcError> {
    let (log_d, h) = weak_params(n)?;
    let (mut s, g) = SymbolicTree::lemma_first(log_d);
    weak_pipeline(&mut s, &g, h)?;
    check_degree(&s)?;
    Ok(WeakSymbolic {
        n,
        log_d,
        h,
        snapshot: s.snapshot(),
    })
}

/// The weak pipeline on the explicit backend, stopped before dead edges
/// are removed, for comparison with [`weak_symbolic`].
pub fn weak_explicit_snapshot(n: u32, budget: u64) -> Result<BackendSnapshot, CalcError> {
    let (log_d, h) = weak_params(n)?;
    let (mut t, leaves) = weak_lemma_first(log_d, budget)?;
    weak_pipeline(&mut t, &leaves, h)?;
    Ok(t.snapshot())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::audit_branches;

    #[test]
    fn params() {
        assert_eq!(weak_params(4).unwrap(), (2, 1));
        assert_eq!(weak_params(8).unwrap(), (5, 2));
        assert_eq!(weak_params(16).unwrap(), (12, 3));
        assert!(matches!(weak_params(32), Err(CalcError::OutOfRange { .. })));
    }

    #[test]
    fn attach_power_small() {
        let (mut t, leaves) = weak_lemma_first(2, 1 << 10).unwrap();
        let groups = weak_attach_power(&mut t, &vec![leaves[0]], 1).unwrap();
        let p0 = t.profile(&groups[0]).unwrap();
        let p1 = t.profile(&groups[1]).unwrap();
        // one edge of size 4, then two edges of size 3
        assert_eq!(p0, vec![UnitShape { length: 4, power: 1, card_log: 0 }]);
        assert_eq!(p1, vec![UnitShape { length: 3, power: 1, card_log: 1 }]);
    }

    #[test]
    fn build_weak_four() {
        let h = build_weak(4).unwrap();
        let a = audit_branches(&h);
        assert_eq!(a.uniform, Some(4));
        assert!(a.max_degree <= 8);
        assert!(a.every_branch_covered);
        assert!(a.violations.is_empty());
    }

    #[test]
    fn shape_mismatch_on_wrong_input() {
        let (mut t, root) = UnitTree::root(2, 64).unwrap();
        assert!(matches!(weak_attach_power(&mut t, &root, 1), Err(CalcError::ShapeMismatch(_))));
    }
}
