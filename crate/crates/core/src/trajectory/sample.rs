use rayon::prelude::*;
use thiserror::Error;

use super::rng::StepRng;
use super::{Trajectory, TrajectorySet};
use crate::model::{to_f64, ActionSchema, Domain, Literal, ModelError, Probability, Problem, State};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Policy {
    /// Uniform over applicable actions, indexed in declaration order.
    Random,
    /// Apply the listed actions in order.
    Script(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleConfig {
    pub seed: u64,
    pub episodes: usize,
    pub max_steps: usize,
    pub policy: Policy,
    pub stop_on_goal: bool,
}

impl SampleConfig {
    pub fn new(seed: u64, episodes: usize, max_steps: usize, policy: Policy) -> Result<Self, SampleError> {
        let cfg = SampleConfig { seed, episodes, max_steps, policy, stop_on_goal: false };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn stop_on_goal(mut self, yes: bool) -> Self {
        self.stop_on_goal = yes;
        self
    }

    fn check(&self) -> Result<(), SampleError> {
        if self.episodes == 0 {
            return Err(SampleError::InvalidConfig("episodes must be at least 1".into()));
        }
        if self.max_steps == 0 {
            return Err(SampleError::InvalidConfig("max_steps must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SampleError {
    #[error("invalid sample configuration: {0}")]
    InvalidConfig(String),
    #[error("action `{0}` has an interval-valued effect; ground truth must be point-valued")]
    IntervalFactor(String),
    #[error("script action `{0}` is not in the domain")]
    UnknownScriptAction(String),
    #[error("episode {episode} step {step}: `{action}` is not applicable (unsatisfied: {unsatisfied})")]
    ScriptPrecondition { episode: usize, step: usize, action: String, unsatisfied: String },
    #[error("episode {episode} step {step}: `{action}` sets `{fluent}` both true and false")]
    ConflictingEffects { episode: usize, step: usize, action: String, fluent: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

struct Compiled<'a> {
    schema: &'a ActionSchema,
    probs: Vec<f64>,
}

/// Executes `domain` from `problem.init` under `cfg`.
///
/// Episodes that end before their first action (no applicable action, or
/// the goal already holds with `stop_on_goal`) produce no trajectory.
/// Trajectory ids are `ep<index>`.
pub fn sample(domain: &Domain, problem: &Problem, cfg: &SampleConfig) -> Result<TrajectorySet, SampleError> {
    cfg.check()?;
    if problem.init.vocabulary() != &domain.vocabulary {
        return Err(ModelError::VocabularyMismatch.into());
    }
    let compiled = domain
        .actions
        .iter()
        .map(|a| {
            let probs = a
                .effect
                .iter()
                .map(|f| match &f.probability {
                    Probability::Point(p) => Ok(to_f64(p)),
                    Probability::Interval { .. } => Err(SampleError::IntervalFactor(a.name.clone())),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Compiled { schema: a, probs })
        })
        .collect::<Result<Vec<_>, SampleError>>()?;
    let script: Option<Vec<usize>> = match &cfg.policy {
        Policy::Random => None,
        Policy::Script(names) => Some(
            names
                .iter()
                .map(|n| {
                    let n = n.to_lowercase();
                    domain.actions.iter().position(|a| a.name == n).ok_or(SampleError::UnknownScriptAction(n))
                })
                .collect::<Result<_, _>>()?,
        ),
    };

    let episodes: Vec<Result<Option<Trajectory>, SampleError>> =
        (0..cfg.episodes).into_par_iter().map(|e| episode(&compiled, script.as_deref(), problem, cfg, e)).collect();
    let mut set = TrajectorySet::new();
    for t in episodes {
        if let Some(t) = t? {
            set.push(t, 1).expect("sampled trajectories share one vocabulary");
        }
    }
    Ok(set)
}

fn episode(
    actions: &[Compiled<'_>],
    script: Option<&[usize]>,
    problem: &Problem,
    cfg: &SampleConfig,
    index: usize,
) -> Result<Option<Trajectory>, SampleError> {
    let mut state = problem.init.clone();
    let mut states = vec![state.clone()];
    let mut names = Vec::new();
    let limit = script.map_or(cfg.max_steps, |s| s.len().min(cfg.max_steps));
    for step in 0..limit {
        if cfg.stop_on_goal && problem.goal_reached(&state)? {
            break;
        }
        let mut rng = StepRng::new(cfg.seed, index as u64, step as u64);
        let chosen = match script {
            Some(s) => {
                let a = &actions[s[step]];
                let unsatisfied: Vec<String> = a
                    .schema
                    .precondition
                    .iter()
                    .filter(|l| !state.holds(l).unwrap_or(false))
                    .map(|l| l.to_string())
                    .collect();
                if !unsatisfied.is_empty() {
                    return Err(SampleError::ScriptPrecondition {
                        episode: index,
                        step: step + 1,
                        action: a.schema.name.clone(),
                        unsatisfied: unsatisfied.join(" "),
                    });
                }
                a
            }
            None => {
                let applicable: Vec<&Compiled<'_>> =
                    actions.iter().filter(|a| a.schema.applicable(&state).unwrap_or(false)).collect();
                if applicable.is_empty() {
                    break;
                }
                applicable[rng.index(applicable.len())]
            }
        };
        state = apply(chosen, &state, &mut rng).map_err(|fluent| SampleError::ConflictingEffects {
            episode: index,
            step: step + 1,
            action: chosen.schema.name.clone(),
            fluent,
        })?;
        states.push(state.clone());
        names.push(chosen.schema.name.clone());
    }
    if names.is_empty() {
        return Ok(None);
    }
    Ok(Some(Trajectory::new(format!("ep{index}"), states, names).expect("well-formed episode")))
}

/// Fires every applicable factor independently against the pre-state snapshot.
/// Each applicable factor consumes one draw, in declaration order.
fn apply(action: &Compiled<'_>, pre: &State, rng: &mut StepRng) -> Result<State, String> {
    let mut post = pre.clone();
    let mut written: Vec<&Literal> = Vec::new();
    for (f, &p) in action.schema.effect.iter().zip(&action.probs) {
        if !f.condition.iter().all(|c| pre.holds(c).unwrap_or(false)) {
            continue;
        }
        if rng.unit() < p {
            if written.iter().any(|w| w.fluent == f.added.fluent && w.positive != f.added.positive) {
                return Err(f.added.fluent.name().to_string());
            }
            written.push(&f.added);
            post.set(&f.added).expect("validated literal");
        }
    }
    Ok(post)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::syntax::{parse_domain, parse_problem};
    use crate::trajectory::{emit_trajectories, parse_trajectories, validate};

    fn coffee() -> (Domain, Problem) {
        let d = parse_domain(fixtures::COFFEE_DOMAIN).unwrap();
        let p = parse_problem(fixtures::COFFEE_PROBLEM, &d).unwrap();
        (d, p)
    }

    fn script(names: &[&str]) -> Policy {
        Policy::Script(names.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn scripted_t4_is_reproduced() {
        let (d, p) = coffee();
        let table = parse_trajectories(fixtures::TRACES, Some(&d.vocabulary)).unwrap();
        let t4 = &table.entries()[3].0;
        let names = [
            "get-umbrella",
            "leave-office-with-umbrella",
            "buy-coffee",
            "move-to-office-with-umbrella",
            "deliver-coffee",
        ];
        for seed in [0, 1, 99, u64::MAX] {
            let cfg = SampleConfig::new(seed, 1, 10, script(&names)).unwrap();
            let ts = sample(&d, &p, &cfg).unwrap();
            assert_eq!(ts.entries()[0].0.states(), t4.states());
        }
    }

    #[test]
    fn config_invariants() {
        assert!(SampleConfig::new(0, 1, 0, Policy::Random).is_err());
        assert!(SampleConfig::new(0, 0, 1, Policy::Random).is_err());
    }

    #[test]
    fn script_errors() {
        let (d, p) = coffee();
        let cfg = SampleConfig::new(0, 1, 10, script(&["buy-coffee"])).unwrap();
        let e = sample(&d, &p, &cfg).unwrap_err();
        assert!(matches!(e, SampleError::ScriptPrecondition { step: 1, .. }), "{e}");
        let cfg = SampleConfig::new(0, 1, 10, script(&["teleport"])).unwrap();
        assert_eq!(sample(&d, &p, &cfg).unwrap_err(), SampleError::UnknownScriptAction("teleport".into()));
    }

    #[test]
    fn interval_ground_truth_rejected() {
        let d = parse_domain(
            "(define (domain d) (:predicates (p)) (:action a :effect (probabilistic-interval 0.1 0.2 (p))))",
        )
        .unwrap();
        let p = parse_problem("(define (problem q) (:init) (:goal (p)))", &d).unwrap();
        let cfg = SampleConfig::new(0, 1, 1, Policy::Random).unwrap();
        assert_eq!(sample(&d, &p, &cfg).unwrap_err(), SampleError::IntervalFactor("a".into()));
    }

    #[test]
    fn conflicting_effects_reported() {
        let d = parse_domain("(define (domain d) (:predicates (p)) (:action a :effect (and (p) (not (p)))))").unwrap();
        let p = parse_problem("(define (problem q) (:init) (:goal (p)))", &d).unwrap();
        let cfg = SampleConfig::new(0, 1, 1, Policy::Random).unwrap();
        assert!(matches!(sample(&d, &p, &cfg), Err(SampleError::ConflictingEffects { .. })));
    }

    #[test]
    fn random_policy_is_deterministic_and_valid() {
        let (d, p) = coffee();
        let cfg = SampleConfig::new(7, 40, 12, Policy::Random).unwrap();
        let a = sample(&d, &p, &cfg).unwrap();
        let b = sample(&d, &p, &cfg).unwrap();
        assert_eq!(emit_trajectories(&a), emit_trajectories(&b));
        assert_eq!(a.len(), 40);
        assert!(validate(&a, &d).unwrap().is_ok());
        let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = serial.install(|| sample(&d, &p, &cfg).unwrap());
        assert_eq!(a, c);
        let other = sample(&d, &p, &SampleConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(emit_trajectories(&a), emit_trajectories(&other));
    }

    #[test]
    fn stop_on_goal_truncates() {
        let (d, p) = coffee();
        let names = [
            "get-umbrella",
            "leave-office-with-umbrella",
            "buy-coffee",
            "move-to-office-with-umbrella",
            "deliver-coffee",
            "leave-office-with-umbrella",
        ];
        let cfg = SampleConfig::new(0, 1, 10, script(&names)).unwrap().stop_on_goal(true);
        let ts = sample(&d, &p, &cfg).unwrap();
        assert_eq!(ts.entries()[0].0.len(), 5);
    }
}
