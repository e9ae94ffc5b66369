//! Small step programs run on both backends, for equivalence checks.

use serde::{Deserialize, Serialize};

use super::backend::{BackendSnapshot, UnitBackend};
use super::explicit::UnitTree;
use super::symbolic::SymbolicTree;
use super::unit::SplitPlan;
use super::CalcError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Start {
    /// A bare root.
    Root,
    /// The complete tree of the first weak lemma.
    LemmaFirst,
}

/// One operation, applied to every open group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    Extend(u32),
    /// Units before `cut` to the first child, the rest to the second.
    Route { cut: usize },
    Repartition,
    Sort,
    Truncate(usize),
    Merge { count: usize },
    Halve { unit: usize },
    /// Closes the groups.
    Collapse { target: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pipeline {
    pub log_d: u32,
    pub start: Start,
    pub steps: Vec<Step>,
}

/// How far a pipeline got.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Outcome {
    /// Steps completed.
    pub completed: usize,
    pub error_kind: Option<&'static str>,
    pub snapshot: BackendSnapshot,
}

fn apply<B: UnitBackend>(b: &mut B, groups: Vec<B::Group>, step: Step) -> Result<Vec<B::Group>, CalcError> {
    let mut out = Vec::with_capacity(groups.len() * 2);
    for g in groups {
        match step {
            Step::Extend(r) => out.push(b.extend(&g, r)?),
            Step::Route { cut } => {
                let len = b.profile(&g)?.len();
                out.extend(b.split(&g, &SplitPlan::cut(len, cut.min(len)))?);
            }
            Step::Repartition => {
                b.repartition(&g)?;
                out.push(g);
            }
            Step::Sort => {
                b.sort_by_length(&g)?;
                out.push(g);
            }
            Step::Truncate(keep) => {
                b.truncate(&g, keep)?;
                out.push(g);
            }
            Step::Merge { count } => out.extend(b.merge(&g, count)?),
            Step::Halve { unit } => out.push(b.halve(&g, unit)?),
            Step::Collapse { target } => b.collapse(&g, target)?,
        }
    }
    Ok(out)
}

/// Runs the steps until one fails.
pub fn run_steps<B: UnitBackend>(b: &mut B, start: Vec<B::Group>, steps: &[Step]) -> (usize, Option<CalcError>) {
    let mut groups = start;
    for (k, &step) in steps.iter().enumerate() {
        match apply(b, groups, step) {
            Ok(next) => groups = next,
            Err(e) => return (k, Some(e)),
        }
    }
    (steps.len(), None)
}

impl Pipeline {
    /// Leaf count and vertex count after the steps, from the symbolic
    /// backend, so callers can size an explicit run.
    pub fn symbolic(&self) -> Outcome {
        let (mut s, g) = match self.start {
            Start::Root => SymbolicTree::root(self.log_d),
            Start::LemmaFirst => SymbolicTree::lemma_first(self.log_d),
        };
        let (completed, err) = run_steps(&mut s, vec![g], &self.steps);
        Outcome {
            completed,
            error_kind: err.map(|e| e.kind()),
            snapshot: s.snapshot(),
        }
    }

    pub fn explicit(&self, budget: u64) -> Result<Outcome, CalcError> {
        let (mut t, leaves) = match self.start {
            Start::Root => UnitTree::root(self.log_d, budget)?,
            Start::LemmaFirst => UnitTree::lemma_first(self.log_d, budget)?,
        };
        let (completed, err) = run_steps(&mut t, vec![leaves], &self.steps);
        if let Some(e @ CalcError::TooLarge { .. }) = err {
            return Err(e);
        }
        Ok(Outcome {
            completed,
            error_kind: err.map(|e| e.kind()),
            snapshot: t.snapshot(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn staircase_agrees() {
        let p = Pipeline {
            log_d: 2,
            start: Start::Root,
            steps: vec![Step::Extend(3)],
        };
        let a = p.symbolic();
        let b = p.explicit(1 << 12).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.snapshot.vertices, 15u32.into());
    }

    #[test]
    fn failures_agree() {
        let p = Pipeline {
            log_d: 3,
            start: Start::Root,
            steps: vec![Step::Extend(2), Step::Merge { count: 3 }],
        };
        let a = p.symbolic();
        assert_eq!(a.error_kind, Some("NotPowerOfTwo"));
        assert_eq!(a, p.explicit(1 << 12).unwrap());
    }
}
