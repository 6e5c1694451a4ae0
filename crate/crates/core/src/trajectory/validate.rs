use std::fmt;

use super::{TrajectoryError, TrajectorySet};
use crate::model::{Domain, Literal, State};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    UnknownAction(String),
    /// Preconditions of the action not satisfied by the pre-state.
    Precondition(Vec<Literal>),
    /// A change no applicable factor with nonzero probability can produce.
    Unexplained(Literal),
    /// A certain, applicable factor whose literal is missing from the post-state.
    MissedCertain(Literal),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub trajectory: String,
    /// 1-based action index within the trajectory.
    pub step: usize,
    pub action: String,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} step {} ({}): ", self.trajectory, self.step, self.action)?;
        match &self.kind {
            ViolationKind::UnknownAction(a) => write!(f, "action `{a}` is not in the domain"),
            ViolationKind::Precondition(lits) => {
                let parts: Vec<String> = lits.iter().map(|l| l.to_string()).collect();
                write!(f, "precondition not satisfied: {}", parts.join(" "))
            }
            ViolationKind::Unexplained(l) => write!(f, "{l} became true but no applicable effect adds it"),
            ViolationKind::MissedCertain(l) => write!(f, "certain effect {l} did not occur"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub trajectories: usize,
    pub triplets: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every triplet against the domain's preconditions and effect factors.
pub fn validate(ts: &TrajectorySet, domain: &Domain) -> Result<ValidationReport, TrajectoryError> {
    let ts = ts.with_vocabulary(&domain.vocabulary)?;
    let mut report = ValidationReport { trajectories: ts.len(), ..Default::default() };
    for (t, _) in ts.entries() {
        for (i, (pre, action, post)) in t.triplets().enumerate() {
            report.triplets += 1;
            let mut push = |kind| {
                report.violations.push(Violation {
                    trajectory: t.id().to_string(),
                    step: i + 1,
                    action: action.to_string(),
                    kind,
                })
            };
            let Some(schema) = domain.action(action) else {
                push(ViolationKind::UnknownAction(action.to_string()));
                continue;
            };
            let unsatisfied: Vec<Literal> = domain
                .vocabulary
                .sorted(&schema.precondition)
                .into_iter()
                .filter(|l| !holds(pre, l))
                .cloned()
                .collect();
            if !unsatisfied.is_empty() {
                push(ViolationKind::Precondition(unsatisfied));
            }
            let applicable: Vec<_> =
                schema.effect.iter().filter(|f| f.condition.iter().all(|c| holds(pre, c))).collect();
            for changed in pre.diff(post).expect("aligned vocabularies") {
                let explained = applicable.iter().any(|f| f.added == changed && f.probability.bounds_f64().1 > 0.0);
                if !explained {
                    push(ViolationKind::Unexplained(changed));
                }
            }
            for f in &applicable {
                if f.probability.bounds_f64().0 >= 1.0 && !holds(post, &f.added) {
                    push(ViolationKind::MissedCertain(f.added.clone()));
                }
            }
        }
    }
    Ok(report)
}

fn holds(s: &State, l: &Literal) -> bool {
    s.holds(l).unwrap_or(false)
}
