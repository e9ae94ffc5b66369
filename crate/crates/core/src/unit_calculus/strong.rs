//! The strong pipeline: degree `2^(n-1)/n` with `d = 2^(n-2)/n`.
//!
//! Every leaf of the staircase is split repeatedly into a branch `v` that
//! keeps the staircase shape and a branch `w` whose units are frozen once
//! they satisfy property P: at least `2L - 6` units, the first `L` of
//! length at most `(1 - c) L`. Each frozen class is finished by one more
//! split and collapsed into single edges of size `n`.
//!
//! The driver is generic over [`UnitBackend`]; every asserted inequality is
//! recorded with its exact margin.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::backend::UnitBackend;
use super::explicit::UnitTree;
use super::report::{
    BranchError, CheckKind, ClassRow, Inequality, ParamsView, Relation, StrongReport, SweepReport, Q,
};
use super::symbolic::SymbolicTree;
use super::unit::{sufficiency_margin, SplitPlan, UnitShape};
use super::CalcError;
use crate::budget::explicit_budget;
use crate::tree::TreeHypergraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Explicit,
    Symbolic,
}

/// What a failed critical check does.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Stop with the matching error.
    Strict,
    /// Record it and keep going; a branch whose next operation cannot run
    /// is abandoned.
    Record,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongParams {
    pub n: u32,
    pub log_d: u32,
    /// Power every branch must reach: `n - log d - 1`.
    pub target: u32,
    pub c: Ratio<i64>,
}

impl StrongParams {
    /// `d = 2^(n-2)/n`; `n` a power of two with `log d` even and at least 6.
    pub fn new(n: u32, c: Ratio<i64>) -> Result<Self, CalcError> {
        if n < 16 || !n.is_power_of_two() || n > 1 << 20 {
            return Err(CalcError::OutOfRange {
                what: "strong n",
                value: n.into(),
            });
        }
        let log_d = n - 2 - n.ilog2();
        let target = n - log_d - 1;
        Self::custom(log_d, target, c).map(|p| Self { n, ..p })
    }

    /// Arbitrary `log d` and target, `n = log d + 1 + target`.
    pub fn custom(log_d: u32, target: u32, c: Ratio<i64>) -> Result<Self, CalcError> {
        if log_d < 6 || log_d % 2 == 1 {
            return Err(CalcError::OutOfRange {
                what: "log d (even, >= 6)",
                value: log_d.into(),
            });
        }
        if c <= Ratio::from_integer(0) || c >= Ratio::from_integer(1) {
            return Err(CalcError::OutOfRange {
                what: "c numerator (c in (0,1))",
                value: *c.numer(),
            });
        }
        Ok(Self {
            n: log_d + 1 + target,
            log_d,
            target,
            c,
        })
    }

    pub fn c_prime(&self) -> Ratio<i64> {
        self.c / 4
    }

    fn l(&self) -> i64 {
        self.log_d.into()
    }

    fn times_l(&self, q: Ratio<i64>) -> Ratio<i64> {
        q * self.l()
    }

    /// Units kept per frozen class.
    pub fn frozen_units(&self) -> usize {
        2 * self.log_d as usize - 6
    }

    /// `floor((1 - c') L)`: units sent to `v` when finishing.
    pub fn finish_cut(&self) -> usize {
        self.times_l(Ratio::from_integer(1) - self.c_prime()).floor().to_integer() as usize
    }

    /// `floor((1 - c) L) + 1`: the length bound before the last extension.
    pub fn finish_reach(&self) -> u32 {
        self.times_l(Ratio::from_integer(1) - self.c).floor().to_integer() as u32 + 1
    }

    pub fn phase1_steps(&self) -> std::ops::RangeInclusive<u32> {
        0..=self.log_d / 2 - 2
    }

    /// Empty when `log d < 12`.
    pub fn phase2_steps(&self) -> std::ops::Range<u32> {
        (self.log_d / 2 - 1)..(self.log_d - 6).max(self.log_d / 2 - 1)
    }

    pub fn view(&self) -> ParamsView {
        ParamsView {
            n: self.n,
            log_d: self.log_d,
            target: self.target,
            c: Q(self.c),
            c_prime: Q(self.c_prime()),
        }
    }
}

/// Lengths the phase-one shape prescribes for step `i`: `1..=k1`, then
/// pairs of length `k1 + r + 1`.
pub fn phase1_shape(log_d: u32, i: u32) -> Vec<u32> {
    let k1 = if i == 0 { log_d } else { log_d - i - 2 };
    let total = (log_d + i) as usize;
    let mut out: Vec<u32> = (1..=k1).collect();
    let mut r = 1;
    while out.len() < total {
        out.push(k1 + r + 1);
        if out.len() < total {
            out.push(k1 + r + 1);
        }
        r += 1;
    }
    out
}

/// Upper bounds of the phase-two shape: `j` up to `k1`, pairs of
/// `k1 + r + 1` for `r <= k2`, then pairs of `k1 + k2 + m + 2`.
pub fn phase2_shape(log_d: u32, i: u32, k1: u32, k2: Option<u32>) -> Vec<u32> {
    let total = (log_d + i) as usize;
    (1..=total as u32)
        .map(|j| {
            if j <= k1 {
                j
            } else {
                let r = (j - k1).div_ceil(2);
                match k2 {
                    Some(k2) if r > k2 => k1 + k2 + (r - k2) + 2,
                    _ => k1 + r + 1,
                }
            }
        })
        .collect()
}

fn q(v: impl Into<i64>) -> Q {
    Q::int(v.into())
}

/// `ceil(2^20 * ledger / 2d) / 2^20`, at most 1 exactly when the ledger is.
fn ledger_ratio(ledger: &BigUint, log_d: u32) -> Q {
    const SCALE: u32 = 20;
    let two_d = BigUint::from(1u32) << (log_d + 1);
    let scaled: BigUint = ((ledger << SCALE) + &two_d - 1u32) / &two_d;
    let num = scaled.to_i64().unwrap_or(i64::MAX >> 1);
    Q::new(num, 1 << SCALE)
}

fn error_for(q: &Inequality, target: u32) -> CalcError {
    match q.kind {
        CheckKind::Shape => CalcError::ShapeMismatch(q.to_string()),
        CheckKind::PropertyP => CalcError::PropertyPViolation(q.to_string()),
        CheckKind::Sufficiency => CalcError::InsufficientUnits {
            target,
            margin: q.margin.0.floor().to_integer(),
        },
        _ => CalcError::CheckFailed(q.to_string()),
    }
}

struct Driver<'a, B: UnitBackend> {
    b: &'a mut B,
    p: StrongParams,
    mode: Mode,
    inequalities: Vec<Inequality>,
    classes: Vec<ClassRow>,
    branch_errors: Vec<BranchError>,
}

impl<B: UnitBackend> Driver<'_, B> {
    #[allow(clippy::too_many_arguments)]
    fn check(&mut self, phase: &str, step: Option<u32>, branch: &str, name: &str, kind: CheckKind, lhs: Q, rel: Relation, rhs: Q) -> Result<bool, CalcError> {
        let ineq = Inequality::new(phase, step, branch, name, kind, lhs, rel, rhs);
        let holds = ineq.holds;
        let fail = !holds && ineq.critical && self.mode == Mode::Strict;
        let err = fail.then(|| error_for(&ineq, self.p.target));
        self.inequalities.push(ineq);
        match err {
            Some(e) => Err(e),
            None => Ok(holds),
        }
    }

    /// Passes an operation's result through, abandoning the branch in
    /// record mode.
    fn op<T>(&mut self, phase: &str, step: Option<u32>, branch: &str, r: Result<T, CalcError>) -> Result<Option<T>, CalcError> {
        match r {
            Ok(t) => Ok(Some(t)),
            Err(e) if self.mode == Mode::Record => {
                self.branch_errors.push(BranchError {
                    phase: phase.into(),
                    step,
                    branch: branch.into(),
                    kind: e.kind().into(),
                    message: e.to_string(),
                });
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }

    fn row(&mut self, phase: &str, step: Option<u32>, branch: &str, g: &B::Group, profile: &[UnitShape], frozen: bool) {
        let mut powers = BTreeMap::new();
        for u in profile {
            *powers.entry(u.power).or_default() += 1;
        }
        self.classes.push(ClassRow {
            phase: phase.into(),
            step,
            branch: branch.into(),
            units: profile.len(),
            leaf_count_log2: self.b.leaf_count_log2(g),
            powers,
            min_length: profile.iter().map(|u| u.length).min(),
            max_length: profile.iter().map(|u| u.length).max(),
            frozen,
        });
    }

    fn degree(&mut self, phase: &str, step: Option<u32>) -> Result<bool, CalcError> {
        let r = ledger_ratio(&self.b.max_degree(), self.p.log_d);
        self.check(phase, step, "", "degree_ledger_over_2d", CheckKind::Degree, r, Relation::AtMost, q(1))
    }

    /// Number of units off the prescribed lengths (exact or upper bounds),
    /// plus the length difference of the lists, plus units of nonzero power.
    fn shape(&mut self, phase: &str, step: u32, profile: &[UnitShape], want: &[u32], exact: bool) -> Result<bool, CalcError> {
        let mut bad = profile.len().abs_diff(want.len());
        for (u, &w) in profile.iter().zip(want) {
            let off = if exact { u.length != w } else { u.length > w };
            bad += usize::from(off || u.power != 0);
        }
        let name = if exact { "shape_exact" } else { "shape_bounded" };
        self.check(phase, Some(step), "v", name, CheckKind::Shape, q(bad as i64), Relation::AtMost, q(0))
    }

    fn max_len(profile: &[UnitShape]) -> i64 {
        profile.iter().map(|u| u.length).max().unwrap_or(0).into()
    }

    /// Property P on a sorted profile, plus the quoted bound on its first
    /// `L` lengths.
    fn property_p(&mut self, phase: &str, step: Option<u32>, branch: &str, profile: &[UnitShape], quoted: Option<Ratio<i64>>) -> Result<(), CalcError> {
        let p = self.p;
        let first = &profile[..profile.len().min(p.log_d as usize)];
        let longest = q(Self::max_len(first));
        self.check(phase, step, branch, "property_p_units", CheckKind::PropertyP, q(profile.len() as i64), Relation::AtLeast, q(p.frozen_units() as i64))?;
        let bound = Q(p.times_l(Ratio::from_integer(1) - p.c));
        self.check(phase, step, branch, "property_p_length", CheckKind::PropertyP, longest, Relation::AtMost, bound)?;
        if let Some(b) = quoted {
            self.check(phase, step, branch, "quoted_length_bound", CheckKind::Advisory, longest, Relation::AtMost, Q(b))?;
        }
        Ok(())
    }

    /// `w` after a phase split: halves of every unit, sorted and frozen,
    /// then finished.
    fn freeze(&mut self, phase: &str, step: u32, w: B::Group, quoted: Ratio<i64>) -> Result<(), CalcError> {
        let s = Some(step);
        let r = self.b.repartition(&w);
        if self.op(phase, s, "w", r)?.is_none() {
            return Ok(());
        }
        let r = self.b.sort_by_length(&w).and_then(|_| self.b.profile(&w));
        let Some(profile) = self.op(phase, s, "w", r)? else {
            return Ok(());
        };
        self.property_p(phase, s, "w", &profile, Some(quoted))?;
        self.freeze_tail(phase, s, w)
    }

    fn freeze_tail(&mut self, phase: &str, step: Option<u32>, g: B::Group) -> Result<(), CalcError> {
        let keep = self.p.frozen_units();
        let r = self.b.truncate(&g, keep).and_then(|_| self.b.profile(&g));
        let Some(profile) = self.op(phase, step, "w", r)? else {
            return Ok(());
        };
        self.b.mark(&g, phase, true);
        self.row(phase, step, "frozen", &g, &profile, true);
        let fin = format!("finish@{phase}");
        self.finish(&fin, step, g)
    }

    /// Last split of a frozen class and the collapse of both halves.
    fn finish(&mut self, phase: &str, step: Option<u32>, g: B::Group) -> Result<(), CalcError> {
        let p = self.p;
        let r = self.b.profile(&g);
        let Some(profile) = self.op(phase, step, "", r)? else {
            return Ok(());
        };
        let cut = p.finish_cut().min(profile.len());
        let r = self.b.split(&g, &SplitPlan::cut(profile.len(), cut));
        let Some([v, w]) = self.op(phase, step, "", r)? else {
            return Ok(());
        };

        // w: power-one units only
        let r = self.b.profile(&w);
        if let Some(wp) = self.op(phase, step, "w", r)? {
            let count = wp.len() as i64;
            let paper = p.times_l(Ratio::from_integer(1) + p.c_prime()) - 6;
            self.check(phase, step, "w", "units_vs_quoted_count", CheckKind::Advisory, q(count), Relation::AtLeast, Q(paper))?;
            let c2 = Ratio::new(count - p.l(), p.l());
            self.check(phase, step, "w", "c_double_prime", CheckKind::Advisory, Q(c2), Relation::AtLeast, Q::new(1, p.l()))?;
            self.row(phase, step, "w", &w, &wp, true);
            self.collapse(phase, step, "w", w, &wp)?;
        }

        // v: halves, then extended up to length L + 1
        let r = self.b.repartition(&v).and_then(|_| self.b.profile(&v));
        if let Some(vp) = self.op(phase, step, "v", r)? {
            let reach = p.finish_reach();
            self.check(phase, step, "v", "pre_extension_length", CheckKind::Precondition, q(Self::max_len(&vp)), Relation::AtMost, q(reach))?;
            let r = self.b.extend(&v, p.log_d + 1 - reach.min(p.log_d + 1));
            if let Some(v2) = self.op(phase, step, "v", r)? {
                let r = self.b.profile(&v2);
                if let Some(vp2) = self.op(phase, step, "v", r)? {
                    self.row(phase, step, "v", &v2, &vp2, true);
                    self.collapse(phase, step, "v", v2, &vp2)?;
                }
            }
        }
        Ok(())
    }

    fn collapse(&mut self, phase: &str, step: Option<u32>, branch: &str, g: B::Group, profile: &[UnitShape]) -> Result<(), CalcError> {
        let t = self.p.target;
        let reach = i64::from(t) + sufficiency_margin(profile, t);
        self.check(phase, step, branch, "sufficiency", CheckKind::Sufficiency, q(reach), Relation::AtLeast, q(t))?;
        let r = self.b.collapse(&g, t);
        self.op(phase, step, branch, r)?;
        Ok(())
    }

    fn phase1_step(&mut self, g: B::Group, i: u32) -> Result<Option<B::Group>, CalcError> {
        let (l, s) = (self.p.log_d, Some(i));
        let r = self.b.profile(&g);
        let Some(profile) = self.op("phase1", s, "v", r)? else {
            return Ok(None);
        };
        self.row("phase1", s, "v", &g, &profile, false);
        self.shape("phase1", i, &profile, &phase1_shape(l, i), true)?;
        let cut = (i as usize + 2).min(profile.len());
        let r = self.b.split(&g, &SplitPlan::cut(profile.len(), cut));
        let Some([v, w]) = self.op("phase1", s, "", r)? else {
            return Ok(None);
        };
        self.freeze("phase1", i, w, Ratio::new(3 * i64::from(l), 4) + 1)?;
        let next = self.advance("phase1", i, v, i + 3, l - i - 3)?;
        self.degree("phase1", s)?;
        Ok(next)
    }

    fn phase2_step(&mut self, g: B::Group, i: u32, k1: u32, k2: Option<u32>) -> Result<Option<B::Group>, CalcError> {
        let (l, s) = (self.p.log_d, Some(i));
        let r = self.b.profile(&g);
        let Some(profile) = self.op("phase2", s, "v", r)? else {
            return Ok(None);
        };
        self.row("phase2", s, "v", &g, &profile, false);
        self.shape("phase2", i, &profile, &phase2_shape(l, i, k1, k2), false)?;
        let cut = (i as usize + 3).min(profile.len());
        let r = self.b.split(&g, &SplitPlan::cut(profile.len(), cut));
        let Some([v, w]) = self.op("phase2", s, "", r)? else {
            return Ok(None);
        };
        self.freeze("phase2", i, w, Ratio::new(3 * i64::from(l), 4) + 3)?;
        self.check("phase2", s, "v", "k2_prime", CheckKind::Precondition, q(k1), Relation::AtLeast, q(2))?;
        let next = self.advance("phase2", i, v, i + 5, l - i - 5)?;
        self.degree("phase2", s)?;
        Ok(next)
    }

    /// Halves of the `v` units, the pre-extension bound, the extension.
    fn advance(&mut self, phase: &str, i: u32, v: B::Group, reach: u32, rounds: u32) -> Result<Option<B::Group>, CalcError> {
        let s = Some(i);
        let r = self.b.repartition(&v).and_then(|_| self.b.profile(&v));
        let Some(vp) = self.op(phase, s, "v", r)? else {
            return Ok(None);
        };
        self.check(phase, s, "v", "pre_extension_length", CheckKind::Precondition, q(Self::max_len(&vp)), Relation::AtMost, q(reach))?;
        let r = self.b.extend(&v, rounds);
        self.op(phase, s, "v", r)
    }

    fn run(&mut self, root: B::Group) -> Result<(), CalcError> {
        let p = self.p;
        let l = p.log_d;
        let r = self.b.extend(&root, l);
        let Some(mut g) = self.op("staircase", None, "v", r)? else {
            return Ok(());
        };
        self.degree("staircase", None)?;
        for i in p.phase1_steps() {
            match self.phase1_step(g, i)? {
                Some(next) => g = next,
                None => return Ok(()),
            }
        }
        let mut last = l / 2 - 1;
        let (mut k1, mut k2) = (l / 2 - 1, None);
        for i in p.phase2_steps() {
            match self.phase2_step(g, i, k1, k2)? {
                Some(next) => g = next,
                None => return Ok(()),
            }
            k2 = Some(k1);
            k1 = l - i - 5;
            last = i + 1;
        }

        let r = self.b.profile(&g);
        let Some(profile) = self.op("final", Some(last), "v", r)? else {
            return Ok(());
        };
        self.row("final", Some(last), "v", &g, &profile, false);
        if k2.is_none() {
            self.shape("final", last, &profile, &phase1_shape(l, last), true)?;
        } else {
            self.shape("final", last, &profile, &phase2_shape(l, last, k1, k2), false)?;
        }
        let r = self.b.sort_by_length(&g).and_then(|_| self.b.profile(&g));
        let Some(sorted) = self.op("final", Some(last), "v", r)? else {
            return Ok(());
        };
        self.property_p("final", Some(last), "v", &sorted, None)?;
        self.freeze_tail("final", Some(last), g)?;
        self.degree("end", None)?;
        Ok(())
    }
}

/// Runs the pipeline from `root` (a group holding one bare root) and
/// reports. In strict mode the first failure ends the run; its error is
/// returned alongside the partial report.
pub fn run_strong<B: UnitBackend>(b: &mut B, root: B::Group, p: &StrongParams, mode: Mode, backend: Backend) -> (StrongReport, Option<CalcError>) {
    let mut d = Driver {
        b,
        p: *p,
        mode,
        inequalities: Vec::new(),
        classes: Vec::new(),
        branch_errors: Vec::new(),
    };
    let err = d.run(root).err();
    let Driver {
        b,
        inequalities,
        classes,
        branch_errors,
        ..
    } = d;
    let max_degree = b.max_degree();
    let two_d = BigUint::from(1u32) << (p.log_d + 1);
    let ledger_within_2d = max_degree <= two_d;
    let all_branches_collapsed = b.all_terminal();
    let first_violation = inequalities.iter().find(|q| q.critical && !q.holds).cloned();
    let certified = err.is_none()
        && first_violation.is_none()
        && branch_errors.is_empty()
        && ledger_within_2d
        && all_branches_collapsed;
    let max_degree_log2 = biguint_log2(&max_degree);
    let report = StrongReport {
        params: p.view(),
        backend: match backend {
            Backend::Explicit => "explicit".into(),
            Backend::Symbolic => "symbolic".into(),
        },
        mode: match mode {
            Mode::Strict => "strict".into(),
            Mode::Record => "record".into(),
        },
        certified,
        first_violation,
        error: err.as_ref().map(|e| e.to_string()),
        error_kind: err.as_ref().map(|e| e.kind().to_string()),
        inequalities,
        classes,
        branch_errors,
        max_degree: max_degree.to_string(),
        max_degree_log2,
        two_d_log2: p.log_d + 1,
        ledger_within_2d,
        vertex_count_log2: b.vertex_count_log2(),
        all_branches_collapsed,
    };
    (report, err)
}

fn biguint_log2(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return x.to_u64().map_or(f64::NAN, |v| (v as f64).log2());
    }
    let top = (x >> (bits - 64)).to_u64().unwrap_or(u64::MAX);
    (top as f64).log2() + (bits - 64) as f64
}

/// The full pipeline on the symbolic backend.
pub fn symbolic_run(p: &StrongParams, mode: Mode) -> StrongReport {
    let (mut s, root) = SymbolicTree::root(p.log_d);
    run_strong(&mut s, root, p, mode, Backend::Symbolic).0
}

/// Vertex count of the finished strong tree, from a symbolic run.
pub fn predicted_vertices(p: &StrongParams) -> Option<u128> {
    let (mut s, root) = SymbolicTree::root(p.log_d);
    run_strong(&mut s, root, p, Mode::Record, Backend::Symbolic);
    s.vertex_count()
}

/// The full pipeline on the explicit backend, guarded by the vertex budget
/// (checked up front from a symbolic run).
pub fn explicit_run(p: &StrongParams, mode: Mode, budget: u64) -> Result<(UnitTree, StrongReport), CalcError> {
    match predicted_vertices(p) {
        Some(v) if v <= u128::from(budget) => {}
        _ => return Err(CalcError::TooLarge { budget }),
    }
    let (mut t, root) = UnitTree::root(p.log_d, budget)?;
    let (report, err) = run_strong(&mut t, root, p, mode, Backend::Explicit);
    match err {
        Some(e) => Err(e),
        None => Ok((t, report)),
    }
}

/// Outcome of [`build_strong`].
#[derive(Clone, Debug)]
pub enum StrongBuild {
    Explicit {
        hypergraph: TreeHypergraph,
        report: Box<StrongReport>,
    },
    Symbolic(Box<StrongReport>),
}

/// The strong construction for `n` with constant `c`. The symbolic backend
/// runs in record mode and always reports; the explicit one is strict.
pub fn build_strong(n: u32, c: Ratio<i64>, backend: Backend) -> Result<StrongBuild, CalcError> {
    build_strong_with_budget(n, c, backend, explicit_budget())
}

pub fn build_strong_with_budget(n: u32, c: Ratio<i64>, backend: Backend, budget: u64) -> Result<StrongBuild, CalcError> {
    let p = StrongParams::new(n, c)?;
    match backend {
        Backend::Symbolic => Ok(StrongBuild::Symbolic(Box::new(symbolic_run(&p, Mode::Record)))),
        Backend::Explicit => {
            let (t, report) = explicit_run(&p, Mode::Strict, budget)?;
            let mut hypergraph = t.finalize();
            hypergraph.set_uniformity_target(Some(n));
            Ok(StrongBuild::Explicit {
                hypergraph,
                report: Box::new(report),
            })
        }
    }
}

/// `i` rounds of unit-increase splits from a single root.
pub fn build_staircase(i: u32, log_d: u32, budget: u64) -> Result<UnitTree, CalcError> {
    if i == 0 || i > log_d + 1 {
        return Err(CalcError::OutOfRange {
            what: "staircase height",
            value: i.into(),
        });
    }
    if (1u128 << (i + 1)) - 1 > u128::from(budget) {
        return Err(CalcError::TooLarge { budget });
    }
    let (mut t, root) = UnitTree::root(log_d, budget)?;
    t.extend(&root, i)?;
    Ok(t)
}

/// Symbolic runs over every `(n, c)`, in record mode.
pub fn sweep(ns: &[u32], cs: &[Ratio<i64>], parallel: bool) -> Result<SweepReport, CalcError> {
    let mut params = Vec::new();
    for &n in ns {
        for &c in cs {
            params.push(StrongParams::new(n, c)?);
        }
    }
    let run = |p: &StrongParams| symbolic_run(p, Mode::Record).summary();
    let rows = if parallel {
        use rayon::prelude::*;
        params.par_iter().map(run).collect()
    } else {
        params.iter().map(run).collect()
    };
    Ok(SweepReport::from_rows(rows))
}
