//! Unit shapes and the pure profile arithmetic shared by both backends.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::CalcError;

/// A unit without edge identities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct UnitShape {
    pub length: u32,
    pub power: u32,
    /// `log2` of the cardinality.
    pub card_log: u32,
}

impl UnitShape {
    /// The unit of the given length and power; `None` when the arithmetic
    /// would need a fractional or negative cardinality exponent.
    pub fn new(log_d: u32, length: u32, power: u32) -> Option<Self> {
        let card_log = (log_d + 1 + power).checked_sub(length)?;
        (length >= 1).then_some(Self { length, power, card_log })
    }

    pub fn holds_invariant(&self, log_d: u32) -> bool {
        self.length >= 1 && self.length + self.card_log == log_d + 1 + self.power
    }

    /// Routing the whole unit through one child.
    pub fn routed(self) -> Self {
        Self {
            length: self.length + 1,
            power: self.power + 1,
            card_log: self.card_log,
        }
    }

    /// Half of the unit extended by one child.
    pub fn halved(self) -> Option<Self> {
        Some(Self {
            length: self.length + 1,
            power: self.power,
            card_log: self.card_log.checked_sub(1)?,
        })
    }

    /// One of the two halves a power-`k` unit splits into without growing.
    pub fn repartitioned(self) -> Option<Self> {
        Some(Self {
            length: self.length,
            power: self.power.checked_sub(1)?,
            card_log: self.card_log.checked_sub(1)?,
        })
    }
}

/// What a node split does with one unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    First,
    Second,
    /// Half of the unit to each child.
    Halve,
    /// Left at the parent; its edges become dead.
    Drop,
}

/// One split of a leaf: a route per unit, plus optional singleton edges of
/// multiplicity `d` on both children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitPlan {
    pub routes: Vec<Route>,
    pub singletons: bool,
}

impl SplitPlan {
    /// The unit-increase split: every unit halved, singletons added.
    pub fn increase(units: usize) -> Self {
        Self {
            routes: vec![Route::Halve; units],
            singletons: true,
        }
    }

    /// Units before `cut` to the first child, the rest to the second.
    pub fn cut(units: usize, cut: usize) -> Self {
        Self {
            routes: (0..units)
                .map(|j| if j < cut { Route::First } else { Route::Second })
                .collect(),
            singletons: false,
        }
    }
}

/// Child profiles of a split. A child's profile lists its singleton unit
/// first, then the units routed to it in their original order.
pub fn split_profile(profile: &[UnitShape], plan: &SplitPlan, log_d: u32) -> Result<[Vec<UnitShape>; 2], CalcError> {
    if plan.routes.len() != profile.len() {
        return Err(CalcError::ShapeMismatch(format!(
            "split plan has {} routes for {} units",
            plan.routes.len(),
            profile.len()
        )));
    }
    let mut out = [Vec::new(), Vec::new()];
    if plan.singletons {
        let s = UnitShape { length: 1, power: 0, card_log: log_d };
        out[0].push(s);
        out[1].push(s);
    }
    for (j, (u, r)) in profile.iter().zip(&plan.routes).enumerate() {
        match r {
            Route::First => out[0].push(u.routed()),
            Route::Second => out[1].push(u.routed()),
            Route::Halve => {
                let h = u.halved().ok_or(CalcError::SingletonUnit(j))?;
                out[0].push(h);
                out[1].push(h);
            }
            Route::Drop => {}
        }
    }
    Ok(out)
}

/// Profile after `rounds` unit-increase splits: fresh units of lengths
/// `1..=rounds`, then the old units lengthened by `rounds`.
pub fn extend_profile(profile: &[UnitShape], rounds: u32, log_d: u32) -> Result<Vec<UnitShape>, CalcError> {
    if rounds > log_d + 1 {
        return Err(CalcError::OutOfRange {
            what: "extension rounds",
            value: rounds.into(),
        });
    }
    let mut out = Vec::with_capacity(profile.len() + rounds as usize);
    for t in 1..=rounds {
        out.push(UnitShape {
            length: t,
            power: 0,
            card_log: log_d + 1 - t,
        });
    }
    for (j, u) in profile.iter().enumerate() {
        if u.card_log < rounds {
            return Err(CalcError::UnitTooLong {
                index: j,
                length: u.length,
                max: (log_d + 1 + u.power).saturating_sub(rounds),
            });
        }
        out.push(UnitShape {
            length: u.length + rounds,
            power: u.power,
            card_log: u.card_log - rounds,
        });
    }
    Ok(out)
}

/// Every unit replaced by its two halves of one power less.
pub fn repartition_profile(profile: &[UnitShape]) -> Result<Vec<UnitShape>, CalcError> {
    let mut out = Vec::with_capacity(profile.len() * 2);
    for (j, u) in profile.iter().enumerate() {
        if u.power == 0 {
            return Err(CalcError::PowerUnderflow(j));
        }
        let h = u.repartitioned().ok_or(CalcError::SingletonUnit(j))?;
        out.push(h);
        out.push(h);
    }
    Ok(out)
}

/// Units chosen to collapse a branch into one edge of size `L + 1 + target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapsePlan {
    pub power: u32,
    pub indices: Vec<usize>,
}

impl CollapsePlan {
    pub fn merge_rounds(&self) -> u32 {
        self.indices.len().trailing_zeros()
    }
}

/// `max_k (k + floor(log2 count_k)) - target` over the powers `k <= target`
/// present; the sufficiency inequality holds for some power iff this is `>= 0`.
pub fn sufficiency_margin(profile: &[UnitShape], target: u32) -> i64 {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for u in profile.iter().filter(|u| u.power <= target) {
        *counts.entry(u.power).or_default() += 1;
    }
    counts
        .iter()
        .map(|(&k, &c)| i64::from(k) + i64::from(c.ilog2()) - i64::from(target))
        .max()
        .unwrap_or(-(i64::from(target) + 1))
}

/// Picks the highest power `k <= target` represented by at least
/// `2^(target-k)` units and takes the first that many of them.
pub fn collapse_plan(profile: &[UnitShape], target: u32) -> Result<CollapsePlan, CalcError> {
    for k in (0..=target).rev() {
        let need_log = target - k;
        if need_log >= usize::BITS - 1 {
            continue;
        }
        let need = 1usize << need_log;
        let indices: Vec<usize> = profile
            .iter()
            .enumerate()
            .filter(|(_, u)| u.power == k)
            .map(|(j, _)| j)
            .take(need)
            .collect();
        if indices.len() == need {
            return Ok(CollapsePlan { power: k, indices });
        }
    }
    Err(CalcError::InsufficientUnits {
        target,
        margin: sufficiency_margin(profile, target),
    })
}

/// `sum 2^e` over the exponents, carried through a histogram so that long
/// profiles cost one pass over the bits.
pub fn sum_pow2(exps: impl IntoIterator<Item = u32>) -> BigUint {
    let mut hist: Vec<u64> = Vec::new();
    for e in exps {
        let e = e as usize;
        if hist.len() <= e {
            hist.resize(e + 1, 0);
        }
        hist[e] += 1;
    }
    let mut bits = Vec::with_capacity(hist.len() + 64);
    let mut carry = 0u64;
    let mut i = 0;
    while i < hist.len() || carry > 0 {
        let v = carry + hist.get(i).copied().unwrap_or(0);
        bits.push(v & 1 == 1);
        carry = v >> 1;
        i += 1;
    }
    let mut digits = vec![0u32; bits.len().div_ceil(32)];
    for (i, b) in bits.iter().enumerate() {
        if *b {
            digits[i / 32] |= 1 << (i % 32);
        }
    }
    BigUint::new(digits)
}

/// Sum of profile cardinalities, i.e. the degree of a vertex whose incident
/// edges are exactly the profile's.
pub fn profile_weight(profile: &[UnitShape]) -> BigUint {
    sum_pow2(profile.iter().map(|u| u.card_log))
}

/// A sum of powers of two kept as exponent counts, for leaf totals whose
/// exponents can run to millions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowSum {
    terms: BTreeMap<u64, u64>,
}

impl PowSum {
    pub fn pow2(exp: u64) -> Self {
        let mut s = Self::default();
        s.add_pow2(exp, 1);
        s
    }

    pub fn add_pow2(&mut self, exp: u64, count: u64) {
        if count > 0 {
            *self.terms.entry(exp).or_default() += count;
        }
    }

    pub fn add(&mut self, other: &PowSum) {
        for (&e, &c) in &other.terms {
            self.add_pow2(e, c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_exp(&self) -> Option<u64> {
        self.terms.keys().next_back().copied()
    }

    /// Exact value; only sensible when [`max_exp`](Self::max_exp) is moderate.
    pub fn to_biguint(&self) -> BigUint {
        self.terms
            .iter()
            .fold(BigUint::default(), |acc, (&e, &c)| acc + (BigUint::from(c) << e))
    }

    /// Exact value when it fits in 128 bits.
    pub fn to_u128(&self) -> Option<u128> {
        let mut total: u128 = 0;
        for (&e, &c) in &self.terms {
            if e >= 127 {
                return None;
            }
            total = total.checked_add((c as u128).checked_mul(1u128 << e)?)?;
        }
        Some(total)
    }

    pub fn log2(&self) -> f64 {
        let Some(top) = self.max_exp() else {
            return f64::NEG_INFINITY;
        };
        let rest: f64 = self
            .terms
            .iter()
            .map(|(&e, &c)| c as f64 * (-((top - e) as f64)).exp2())
            .sum();
        top as f64 + rest.log2()
    }
}
