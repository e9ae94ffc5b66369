//! Audit records produced by the strong pipeline.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational, serialized as `"p/q"` or `"p"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Q(pub Ratio<i64>);

impl Q {
    pub fn int(v: i64) -> Self {
        Q(Ratio::from_integer(v))
    }

    pub fn new(num: i64, den: i64) -> Self {
        Q(Ratio::new(num, den))
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl From<Ratio<i64>> for Q {
    fn from(r: Ratio<i64>) -> Self {
        Q(r)
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Q {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if let Some((whole, frac)) = s.split_once('.') {
            // a terminating decimal such as 0.125
            let bad = || format!("bad rational {s:?}");
            if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = whole.starts_with('-');
            let whole: i64 = match whole.trim_start_matches(['-', '+']) {
                "" => 0,
                w => w.parse().map_err(|_| bad())?,
            };
            let den = 10i64.pow(frac.len() as u32);
            let num = whole
                .checked_mul(den)
                .and_then(|w| w.checked_add(frac.parse::<i64>().ok()?))
                .ok_or_else(bad)?;
            return Ok(Q(Ratio::new(if negative { -num } else { num }, den)));
        }
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: i64 = n.parse().map_err(|_| format!("bad rational {s:?}"))?;
        let d: i64 = d.parse().map_err(|_| format!("bad rational {s:?}"))?;
        if d == 0 {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(Q(Ratio::new(n, d)))
    }
}

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which way an inequality points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

/// How a failed check is handled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Shape,
    PropertyP,
    Precondition,
    Sufficiency,
    Degree,
    /// An intermediate bound quoted from the argument; reported only.
    Advisory,
}

impl CheckKind {
    pub fn critical(self) -> bool {
        self != CheckKind::Advisory
    }
}

/// One asserted inequality `lhs <= rhs` or `lhs >= rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub phase: String,
    pub step: Option<u32>,
    /// `v`, `w` or empty for whole-state checks.
    pub branch: String,
    pub name: String,
    pub kind: CheckKind,
    pub lhs: Q,
    pub relation: Relation,
    pub rhs: Q,
    /// Slack towards the valid side; negative when the check fails.
    pub margin: Q,
    pub holds: bool,
    pub critical: bool,
}

impl Inequality {
    #[allow(clippy::too_many_arguments)]
    pub fn new(phase: &str, step: Option<u32>, branch: &str, name: &str, kind: CheckKind, lhs: Q, relation: Relation, rhs: Q) -> Self {
        let margin = match relation {
            Relation::AtMost => Q(rhs.0 - lhs.0),
            Relation::AtLeast => Q(lhs.0 - rhs.0),
        };
        Self {
            phase: phase.into(),
            step,
            branch: branch.into(),
            name: name.into(),
            kind,
            lhs,
            relation,
            rhs,
            holds: margin.0 >= Ratio::from_integer(0),
            margin,
            critical: kind.critical(),
        }
    }

    /// `phase[step].branch.name`, e.g. `phase2[7].w.property_p_length`.
    pub fn label(&self) -> String {
        let mut s = self.phase.clone();
        if let Some(i) = self.step {
            s.push_str(&format!("[{i}]"));
        }
        if !self.branch.is_empty() {
            s.push('.');
            s.push_str(&self.branch);
        }
        s.push('.');
        s.push_str(&self.name);
        s
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        };
        write!(f, "{}: {} {rel} {} (margin {})", self.label(), self.lhs, self.rhs, self.margin)
    }
}

/// One row of the per-phase class table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassRow {
    pub phase: String,
    pub step: Option<u32>,
    pub branch: String,
    pub units: usize,
    pub leaf_count_log2: f64,
    /// Units per power.
    pub powers: BTreeMap<u32, usize>,
    pub min_length: Option<u32>,
    pub max_length: Option<u32>,
    pub frozen: bool,
}

/// An operation that could not run; its branch was abandoned.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchError {
    pub phase: String,
    pub step: Option<u32>,
    pub branch: String,
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsView {
    pub n: u32,
    pub log_d: u32,
    pub target: u32,
    pub c: Q,
    pub c_prime: Q,
}

/// Result of one run of the strong pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongReport {
    pub params: ParamsView,
    pub backend: String,
    pub mode: String,
    /// Every critical check held, all branches collapsed and the ledger
    /// stayed within `2d`.
    pub certified: bool,
    pub first_violation: Option<Inequality>,
    /// A step that could not run at all (strict mode, or a broken invariant).
    pub error: Option<String>,
    pub error_kind: Option<String>,
    pub inequalities: Vec<Inequality>,
    pub classes: Vec<ClassRow>,
    pub branch_errors: Vec<BranchError>,
    /// Largest creation-time degree, in decimal.
    pub max_degree: String,
    pub max_degree_log2: f64,
    pub two_d_log2: u32,
    pub ledger_within_2d: bool,
    pub vertex_count_log2: f64,
    pub all_branches_collapsed: bool,
}

impl StrongReport {
    pub fn critical_failures(&self) -> impl Iterator<Item = &Inequality> {
        self.inequalities.iter().filter(|q| q.critical && !q.holds)
    }

    /// Smallest margin per check name.
    pub fn min_margins(&self) -> BTreeMap<String, Q> {
        let mut m: BTreeMap<String, Q> = BTreeMap::new();
        for q in &self.inequalities {
            let key = if q.branch.is_empty() {
                format!("{}.{}", q.phase, q.name)
            } else {
                format!("{}.{}.{}", q.phase, q.branch, q.name)
            };
            m.entry(key).and_modify(|x| *x = (*x).min(q.margin)).or_insert(q.margin);
        }
        m
    }

    pub fn summary(&self) -> SweepRow {
        SweepRow {
            n: self.params.n,
            log_d: self.params.log_d,
            c: self.params.c,
            certified: self.certified,
            first_violation: self.first_violation.as_ref().map(|q| q.to_string()),
            error: self.error.clone(),
            branch_errors: self.branch_errors.len(),
            checks: self.inequalities.len(),
            failed_critical: self.critical_failures().count(),
            failed_advisory: self.inequalities.iter().filter(|q| !q.critical && !q.holds).count(),
            min_margins: self.min_margins(),
            max_degree_log2: self.max_degree_log2,
            two_d_log2: self.two_d_log2,
            ledger_within_2d: self.ledger_within_2d,
            vertex_count_log2: self.vertex_count_log2,
        }
    }
}

/// Condensed [`StrongReport`] for parameter sweeps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: u32,
    pub log_d: u32,
    pub c: Q,
    pub certified: bool,
    pub first_violation: Option<String>,
    pub error: Option<String>,
    pub branch_errors: usize,
    pub checks: usize,
    pub failed_critical: usize,
    pub failed_advisory: usize,
    pub min_margins: BTreeMap<String, Q>,
    pub max_degree_log2: f64,
    pub two_d_log2: u32,
    pub ledger_within_2d: bool,
    pub vertex_count_log2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// Smallest `n`, then smallest `c`, among certified runs.
    pub minimal_certified: Option<(u32, Q)>,
}

impl SweepReport {
    pub fn from_rows(rows: Vec<SweepRow>) -> Self {
        let minimal_certified = rows
            .iter()
            .filter(|r| r.certified)
            .map(|r| (r.n, r.c))
            .min();
        Self { rows, minimal_certified }
    }
}
