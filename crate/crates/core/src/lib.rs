//! Learning stochastic planning action models from observed trajectories.
//!
//! The crate reads and writes a propositional PPDDL subset (plus an
//! interval-probability extension), learns preconditions and per-literal
//! effect probabilities from weighted trajectory sets, and can generate
//! trajectories from a ground-truth domain with a seeded sampler.

pub mod eval;
pub mod fixtures;
pub mod learner;
pub mod model;
pub mod syntax;
pub mod trajectory;

pub use eval::{evaluate, EvalReport};
pub use learner::{
    count_effects, credal_interval, emit_learned, learn, learn_preconditions, point_estimate, render_learned,
    CredalInterval, EffectCounts, LearnError, LearnedAction, LearnedModel, LearnerConfig, Mode, PointEstimate,
};
pub use model::{literal_diff, state_satisfies, Domain, Fluent, Literal, Probability, Problem, State, Vocabulary};
pub use syntax::{emit_domain, emit_problem, parse_domain, parse_problem, SyntaxError};
pub use trajectory::{
    emit_trajectories, parse_trajectories, sample, triplets_for, validate, ActionTriplet, Policy, SampleConfig,
    Trajectory, TrajectorySet,
};
