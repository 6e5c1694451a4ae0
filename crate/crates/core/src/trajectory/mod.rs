//! Observed trajectories, the `.traj` file format, a consistency validator
//! and a seeded sampler that executes a ground-truth domain.

mod format;
pub mod rng;
mod sample;
mod validate;

use std::sync::Arc;

use thiserror::Error;

use crate::model::{ModelError, State, Vocabulary};
use crate::syntax::SyntaxError;

pub use format::{emit_trajectories, infer_vocabulary, parse_trajectories};
pub use sample::{sample, Policy, SampleConfig, SampleError};
pub use validate::{validate, ValidationReport, Violation, ViolationKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrajectoryError {
    #[error("trajectory `{0}` has no actions")]
    Empty(String),
    #[error("trajectory `{0}` must alternate states and actions, starting and ending with a state")]
    Shape(String),
    #[error("trajectory `{0}` has weight 0; weights must be positive")]
    ZeroWeight(String),
    #[error("trajectory `{id}`: {source}")]
    Model {
        id: String,
        #[source]
        source: ModelError,
    },
    #[error("trajectories use fluents not in the domain vocabulary: {0:?}")]
    VocabularyConflict(Vec<String>),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

/// One observed transition ⟨s, a, s′⟩.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionTriplet {
    pub pre: State,
    pub action: String,
    pub post: State,
}

/// Borrowed triplet carrying the weight of its trajectory.
#[derive(Debug, Clone, Copy)]
pub struct WeightedTriplet<'a> {
    pub pre: &'a State,
    pub action: &'a str,
    pub post: &'a State,
    pub weight: u64,
}

impl WeightedTriplet<'_> {
    pub fn to_owned(&self) -> ActionTriplet {
        ActionTriplet { pre: self.pre.clone(), action: self.action.to_string(), post: self.post.clone() }
    }
}

/// Alternating sequence s₀, a₁, s₁, …, aₙ, sₙ with n ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    id: String,
    states: Vec<State>,
    actions: Vec<String>,
}

impl Trajectory {
    pub fn new(id: impl Into<String>, states: Vec<State>, actions: Vec<String>) -> Result<Self, TrajectoryError> {
        let id = id.into();
        if actions.is_empty() {
            return Err(TrajectoryError::Empty(id));
        }
        if states.len() != actions.len() + 1 {
            return Err(TrajectoryError::Shape(id));
        }
        let vocab = states[0].vocabulary();
        if states.iter().any(|s| s.vocabulary() != vocab) {
            return Err(TrajectoryError::Model { id, source: ModelError::VocabularyMismatch });
        }
        let actions = actions.into_iter().map(|a| a.to_lowercase()).collect();
        Ok(Trajectory { id, states, actions })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    /// Number of actions (and of triplets).
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn vocabulary(&self) -> &Arc<Vocabulary> {
        self.states[0].vocabulary()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (&State, &str, &State)> + '_ {
        self.actions.iter().enumerate().map(move |(i, a)| (&self.states[i], a.as_str(), &self.states[i + 1]))
    }
}

/// A weighted multiset of trajectories over one vocabulary.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrajectorySet {
    entries: Vec<(Trajectory, u64)>,
}

impl TrajectorySet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, trajectory: Trajectory, weight: u64) -> Result<(), TrajectoryError> {
        if weight == 0 {
            return Err(TrajectoryError::ZeroWeight(trajectory.id));
        }
        if let Some(v) = self.vocabulary() {
            if v != trajectory.vocabulary() {
                return Err(TrajectoryError::Model { id: trajectory.id, source: ModelError::VocabularyMismatch });
            }
        }
        self.entries.push((trajectory, weight));
        Ok(())
    }

    /// Appends every entry of `other`.
    pub fn extend(&mut self, other: TrajectorySet) -> Result<(), TrajectoryError> {
        for (t, w) in other.entries {
            self.push(t, w)?;
        }
        Ok(())
    }

    pub fn entries(&self) -> &[(Trajectory, u64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn vocabulary(&self) -> Option<&Arc<Vocabulary>> {
        self.entries.first().map(|(t, _)| t.vocabulary())
    }

    /// Σ weight × step count.
    pub fn total_triplet_weight(&self) -> u64 {
        self.entries.iter().map(|(t, w)| w * t.len() as u64).sum()
    }

    /// Action names in order of first appearance.
    pub fn action_names(&self) -> Vec<String> {
        let mut names: Vec<String> = Vec::new();
        for (t, _) in &self.entries {
            for a in t.actions() {
                if !names.contains(a) {
                    names.push(a.clone());
                }
            }
        }
        names
    }

    /// Every triplet whose action is `action`, each carrying its trajectory's weight.
    pub fn triplets_for(&self, action: &str) -> Vec<WeightedTriplet<'_>> {
        let action = action.to_lowercase();
        self.entries
            .iter()
            .flat_map(|(t, w)| {
                t.triplets().map(move |(pre, a, post)| WeightedTriplet { pre, action: a, post, weight: *w })
            })
            .filter(|wt| wt.action == action)
            .collect()
    }

    /// Re-expresses every state over `target`. Fluents missing from the
    /// current vocabulary are false (they were never observed true).
    pub fn with_vocabulary(&self, target: &Arc<Vocabulary>) -> Result<TrajectorySet, TrajectoryError> {
        let Some(current) = self.vocabulary() else {
            return Ok(self.clone());
        };
        if current == target {
            return Ok(self.clone());
        }
        let unknown: Vec<String> =
            current.fluents().iter().filter(|f| !target.contains(f)).map(|f| f.name().to_string()).collect();
        if !unknown.is_empty() {
            return Err(TrajectoryError::VocabularyConflict(unknown));
        }
        let mut out = TrajectorySet::new();
        for (t, w) in &self.entries {
            let states = t
                .states
                .iter()
                .map(|s| State::from_true(target.clone(), s.true_fluents()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|source| TrajectoryError::Model { id: t.id.clone(), source })?;
            out.push(Trajectory { id: t.id.clone(), states, actions: t.actions.clone() }, *w)?;
        }
        Ok(out)
    }

    /// The same multiset with every weight-w entry repeated w times at weight 1.
    pub fn expanded(&self) -> TrajectorySet {
        let mut out = TrajectorySet::new();
        for (t, w) in &self.entries {
            for _ in 0..*w {
                out.entries.push((t.clone(), 1));
            }
        }
        out
    }
}

/// `triplets_for(ts, a)`.
pub fn triplets_for<'a>(ts: &'a TrajectorySet, action: &str) -> Vec<WeightedTriplet<'a>> {
    ts.triplets_for(action)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn total(ts: &[WeightedTriplet<'_>]) -> u64 {
        ts.iter().map(|t| t.weight).sum()
    }

    #[test]
    fn lowou_triplets() {
        let ts = parse_trajectories(fixtures::TRACES, None).unwrap();
        let lowou = ts.triplets_for("leave-office-without-umbrella");
        assert_eq!(lowou.len(), 3);
        assert_eq!(total(&lowou), 3);
        let skewed = parse_trajectories(fixtures::TRACES_SKEWED, None).unwrap();
        let lowou = skewed.triplets_for("leave-office-without-umbrella");
        assert_eq!(lowou.len(), 3);
        assert_eq!(total(&lowou), 1000);
        assert!(ts.triplets_for("no-such-action").is_empty());
    }

    #[test]
    fn weight_is_preserved_across_actions() {
        for text in [fixtures::TRACES, fixtures::TRACES_X100, fixtures::TRACES_SKEWED, fixtures::TRACES_SKEWED_19] {
            let ts = parse_trajectories(text, None).unwrap();
            let by_action: u64 = ts.action_names().iter().map(|a| total(&ts.triplets_for(a))).sum();
            assert_eq!(by_action, ts.total_triplet_weight());
        }
        let ts = parse_trajectories(fixtures::TRACES, None).unwrap();
        assert_eq!(ts.total_triplet_weight(), 13);
    }

    #[test]
    fn trajectory_shape_checks() {
        let v = Arc::new(Vocabulary::from_names(&["p"]).unwrap());
        let s = State::all_false(v);
        assert_eq!(Trajectory::new("x", vec![s.clone()], vec![]).unwrap_err(), TrajectoryError::Empty("x".into()));
        assert!(matches!(Trajectory::new("x", vec![s.clone()], vec!["a".into()]), Err(TrajectoryError::Shape(_))));
        let t = Trajectory::new("x", vec![s.clone(), s], vec!["A".into()]).unwrap();
        assert_eq!(t.actions(), &["a".to_string()]);
        let mut ts = TrajectorySet::new();
        assert!(matches!(ts.push(t, 0), Err(TrajectoryError::ZeroWeight(_))));
    }

    #[test]
    fn remap_to_domain_vocabulary() {
        let ts = parse_trajectories(fixtures::TRACES, None).unwrap();
        let d = crate::syntax::parse_domain(fixtures::COFFEE_DOMAIN).unwrap();
        assert_ne!(ts.vocabulary().unwrap(), &d.vocabulary);
        let aligned = ts.with_vocabulary(&d.vocabulary).unwrap();
        let direct = parse_trajectories(fixtures::TRACES, Some(&d.vocabulary)).unwrap();
        assert_eq!(aligned, direct);
        let other = Arc::new(Vocabulary::from_names(&["in-office"]).unwrap());
        assert!(matches!(ts.with_vocabulary(&other), Err(TrajectoryError::VocabularyConflict(_))));
    }
}
