//! Symbolic backend: one [`LeafClass`] per set of leaves with a common history.
//!
//! All leaves of a class carry the same profile, so each operation is applied
//! once per class. Leaf counts are powers of two (every split doubles a
//! class) and the tree stays full, so the vertex count is `2 * leaves - 1`.
//! Degrees are exact: a vertex created by a split meets precisely the edges
//! of its profile, so its degree is the profile's total cardinality.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::Serialize;

use super::backend::{BackendSnapshot, UnitBackend};
use super::explicit::{check_merge, halve_plan};
use super::unit::{
    collapse_plan, extend_profile, profile_weight, repartition_profile, split_profile, PowSum, Route, SplitPlan,
    UnitShape,
};
use super::CalcError;

#[derive(Clone, Debug, Serialize)]
pub struct LeafClass {
    pub profile: Vec<UnitShape>,
    /// The class holds `2^leaf_log` leaves.
    pub leaf_log: u64,
    /// Largest degree of any vertex created on this class's branches.
    pub degree_ledger: BigUint,
    pub phase_tag: String,
    pub frozen: bool,
    /// Some dropped unit left edges on these branches.
    pub dead_on_branch: bool,
    /// False once an operation has grown vertices below the class.
    pub live: bool,
}

#[derive(Clone, Debug)]
pub struct SymbolicTree {
    log_d: u32,
    classes: Vec<LeafClass>,
    terminal: BTreeMap<Vec<UnitShape>, PowSum>,
    max_degree: BigUint,
}

impl SymbolicTree {
    fn with_class(log_d: u32, class: LeafClass) -> (Self, usize) {
        let max_degree = class.degree_ledger.clone();
        (
            Self {
                log_d,
                classes: vec![class],
                terminal: BTreeMap::new(),
                max_degree,
            },
            0,
        )
    }

    pub fn root(log_d: u32) -> (Self, usize) {
        Self::with_class(
            log_d,
            LeafClass {
                profile: Vec::new(),
                leaf_log: 0,
                degree_ledger: BigUint::default(),
                phase_tag: "root".into(),
                frozen: false,
                dead_on_branch: false,
                live: true,
            },
        )
    }

    /// The complete tree of the first weak lemma. A vertex on level `l`
    /// has degree `2^(L-l) * (2^(l+1) - 1)`, largest on the leaves.
    pub fn lemma_first(log_d: u32) -> (Self, usize) {
        let profile = (0..=log_d)
            .map(|i| UnitShape {
                length: log_d + 1 - i,
                power: 0,
                card_log: i,
            })
            .collect();
        Self::with_class(
            log_d,
            LeafClass {
                profile,
                leaf_log: log_d.into(),
                degree_ledger: (BigUint::from(1u32) << (log_d + 1)) - 1u32,
                phase_tag: "lemma-first".into(),
                frozen: false,
                dead_on_branch: false,
                live: true,
            },
        )
    }

    pub fn class(&self, g: usize) -> &LeafClass {
        &self.classes[g]
    }

    pub fn classes(&self) -> &[LeafClass] {
        &self.classes
    }

    pub fn two_d(&self) -> BigUint {
        BigUint::from(1u32) << (self.log_d + 1)
    }

    fn live(&self, g: usize) -> Result<&LeafClass, CalcError> {
        match self.classes.get(g) {
            Some(c) if c.live => Ok(c),
            _ => Err(CalcError::ShapeMismatch(format!("class {g} is not a set of leaves"))),
        }
    }

    /// Retires `g` and returns its profile.
    fn consume(&mut self, g: usize) -> Vec<UnitShape> {
        let c = &mut self.classes[g];
        c.live = false;
        std::mem::take(&mut c.profile)
    }

    fn spawn(&mut self, parent: usize, profile: Vec<UnitShape>, extra_leaf_log: u64, degree: Option<BigUint>, dead: bool) -> usize {
        let p = &self.classes[parent];
        let mut ledger = p.degree_ledger.clone();
        if let Some(d) = degree {
            if d > ledger {
                ledger = d;
            }
        }
        if ledger > self.max_degree {
            self.max_degree = ledger.clone();
        }
        let class = LeafClass {
            profile,
            leaf_log: p.leaf_log + extra_leaf_log,
            degree_ledger: ledger,
            phase_tag: p.phase_tag.clone(),
            frozen: p.frozen,
            dead_on_branch: p.dead_on_branch || dead,
            live: true,
        };
        self.classes.push(class);
        self.classes.len() - 1
    }

    fn note_degree(&mut self, d: BigUint) {
        if d > self.max_degree {
            self.max_degree = d;
        }
    }

    /// All current leaves, terminal ones included.
    pub fn total_leaves(&self) -> PowSum {
        let mut s = PowSum::default();
        for c in self.classes.iter().filter(|c| c.live) {
            s.add_pow2(c.leaf_log, 1);
        }
        for t in self.terminal.values() {
            s.add(t);
        }
        s
    }

    pub fn terminal_leaves(&self) -> PowSum {
        let mut s = PowSum::default();
        for t in self.terminal.values() {
            s.add(t);
        }
        s
    }

    /// Vertex count when it fits in 128 bits.
    pub fn vertex_count(&self) -> Option<u128> {
        self.total_leaves().to_u128().and_then(|l| l.checked_mul(2)).map(|v| v - 1)
    }

    pub fn live_classes(&self) -> impl Iterator<Item = (usize, &LeafClass)> {
        self.classes.iter().enumerate().filter(|(_, c)| c.live)
    }

    /// Total creation-time degrees of the two halves, in the first merge round.
    fn merge_halves(profile: &[UnitShape], count: usize) -> [BigUint; 2] {
        let half = count / 2;
        [
            profile_weight(&profile[..half]),
            profile_weight(&profile[half..count]),
        ]
    }
}

impl UnitBackend for SymbolicTree {
    type Group = usize;

    fn log_d(&self) -> u32 {
        self.log_d
    }

    fn profile(&self, g: &usize) -> Result<Vec<UnitShape>, CalcError> {
        Ok(self.live(*g)?.profile.clone())
    }

    fn split(&mut self, g: &usize, plan: &SplitPlan) -> Result<[usize; 2], CalcError> {
        let [a, b] = split_profile(&self.live(*g)?.profile, plan, self.log_d)?;
        let dead = plan.routes.contains(&Route::Drop);
        self.consume(*g);
        let (da, db) = (profile_weight(&a), profile_weight(&b));
        let x = self.spawn(*g, a, 0, Some(da), dead);
        let y = self.spawn(*g, b, 0, Some(db), dead);
        Ok([x, y])
    }

    fn repartition(&mut self, g: &usize) -> Result<(), CalcError> {
        let next = repartition_profile(&self.live(*g)?.profile)?;
        self.classes[*g].profile = next;
        Ok(())
    }

    fn sort_by_length(&mut self, g: &usize) -> Result<(), CalcError> {
        self.live(*g)?;
        self.classes[*g].profile.sort_by_key(|u| u.length);
        Ok(())
    }

    fn truncate(&mut self, g: &usize, keep: usize) -> Result<(), CalcError> {
        self.live(*g)?;
        let c = &mut self.classes[*g];
        if keep < c.profile.len() {
            c.profile.truncate(keep);
            c.dead_on_branch = true;
        }
        Ok(())
    }

    fn extend(&mut self, g: &usize, rounds: u32) -> Result<usize, CalcError> {
        let old = &self.live(*g)?.profile;
        let next = extend_profile(old, rounds, self.log_d)?;
        let degree = if rounds == 0 {
            None
        } else {
            // degrees along the extension move monotonically towards 2d,
            // so the first or the last round attains the maximum
            let first: BigUint = (BigUint::from(1u32) << self.log_d) + (profile_weight(old) >> 1u32);
            let last = profile_weight(&next);
            Some(first.max(last))
        };
        self.consume(*g);
        Ok(self.spawn(*g, next, rounds.into(), degree, false))
    }

    fn merge(&mut self, g: &usize, count: usize) -> Result<Vec<usize>, CalcError> {
        let profile = self.live(*g)?.profile.clone();
        check_merge(&profile, count)?;
        if count == 1 {
            self.truncate(g, 1)?;
            return Ok(vec![*g]);
        }
        let rounds = count.trailing_zeros();
        let halves = Self::merge_halves(&profile, count);
        let dead = count < profile.len();
        self.consume(*g);
        Ok(profile[..count]
            .iter()
            .enumerate()
            .map(|(j, u)| {
                let merged = UnitShape {
                    length: u.length + rounds,
                    power: u.power + rounds,
                    card_log: u.card_log,
                };
                let degree = halves[usize::from(j >= count / 2)].clone();
                self.spawn(*g, vec![merged], 0, Some(degree), dead)
            })
            .collect())
    }

    fn halve(&mut self, g: &usize, unit: usize) -> Result<usize, CalcError> {
        let profile = &self.live(*g)?.profile;
        halve_plan(profile, unit)?;
        let shape = profile[unit];
        let dead = profile.len() > 1;
        let half = shape.halved().expect("checked by the plan");
        self.consume(*g);
        Ok(self.spawn(*g, vec![half], 1, Some(BigUint::from(1u32) << half.card_log), dead))
    }

    fn collapse(&mut self, g: &usize, target: u32) -> Result<(), CalcError> {
        let profile = self.live(*g)?.profile.clone();
        let plan = collapse_plan(&profile, target)?;
        let chosen: Vec<UnitShape> = plan.indices.iter().map(|&j| profile[j]).collect();
        let rounds = plan.merge_rounds();
        let degree = if rounds > 0 {
            let [a, b] = Self::merge_halves(&chosen, chosen.len());
            Some(a.max(b))
        } else if chosen[0].card_log > 0 {
            Some(BigUint::from(1u32) << (chosen[0].card_log - 1))
        } else {
            None
        };
        if let Some(d) = degree {
            self.note_degree(d);
        }
        let leaf_log = self.classes[*g].leaf_log;
        self.consume(*g);
        for u in chosen {
            let last = UnitShape {
                length: u.length + rounds + u.card_log,
                power: u.power + rounds,
                card_log: 0,
            };
            self.terminal
                .entry(vec![last])
                .or_default()
                .add_pow2(leaf_log + u64::from(u.card_log), 1);
        }
        Ok(())
    }

    fn mark(&mut self, g: &usize, tag: &str, frozen: bool) {
        if let Some(c) = self.classes.get_mut(*g) {
            c.phase_tag = tag.to_string();
            c.frozen = frozen;
        }
    }

    fn leaf_count_log2(&self, g: &usize) -> f64 {
        self.classes[*g].leaf_log as f64
    }

    fn max_degree(&self) -> BigUint {
        self.max_degree.clone()
    }

    fn vertex_count_log2(&self) -> f64 {
        // 2 * leaves - 1, within rounding for large counts
        match self.vertex_count() {
            Some(v) => (v as f64).log2(),
            None => self.total_leaves().log2() + 1.0,
        }
    }

    fn all_terminal(&self) -> bool {
        self.live_classes().next().is_none()
    }

    fn snapshot(&self) -> BackendSnapshot {
        let mut profiles: BTreeMap<Vec<UnitShape>, BigUint> = BTreeMap::new();
        let mut covered = true;
        for (_, c) in self.live_classes() {
            covered &= !c.profile.is_empty() || c.dead_on_branch;
            *profiles.entry(c.profile.clone()).or_default() += BigUint::from(1u32) << c.leaf_log;
        }
        for (p, count) in &self.terminal {
            *profiles.entry(p.clone()).or_default() += count.to_biguint();
        }
        let leaves = self.total_leaves().to_biguint();
        BackendSnapshot {
            profiles,
            max_degree: self.max_degree.clone(),
            vertices: (&leaves << 1u32) - 1u32,
            leaves,
            covered,
        }
    }
}
