//! Learning a stochastic action model from trajectories.
//!
//! Preconditions are the intersection of all observed pre-states. For each
//! literal ℓ, only triplets with ℓ ∉ s say anything about ℓ as an effect, so
//! every estimate is built from two weighted counts: `added` (ℓ ∈ s′∖s) and
//! `eligible` (ℓ ∉ s).
//!
//! * Interval form. Observed effects get a Hoeffding interval
//!   `added/eligible ± √(ln(2/δ) / 2·eligible)`; never-observed effects get
//!   `[0, ln(1/δ)/eligible]`; with `eligible = 0` the interval is `[0,1]`.
//!   All intervals are clipped to `[0,1]`.
//! * Point form. Observed effects get the exact ratio `added/eligible`;
//!   never-observed effects get `ln(2·|F|·|A|/δ) / 2·eligible`, capped at 1.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign};
use std::sync::Arc;

use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::model::{round_to_decimals, ActionSchema, Domain, EffectFactor, Literal, Probability, Rational, Vocabulary};
use crate::syntax::emit_domain;
use crate::trajectory::{TrajectoryError, TrajectorySet, WeightedTriplet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LearnError {
    #[error("no trajectories to learn from")]
    Empty,
    #[error("invalid learner configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Vocabulary(#[from] TrajectoryError),
    #[error("trajectories use actions not in the domain: {0:?}")]
    UnknownActions(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Interval,
    Point,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Interval => "interval",
            Mode::Point => "point",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "interval" => Ok(Mode::Interval),
            "point" => Ok(Mode::Point),
            other => Err(format!("unknown mode `{other}` (expected `interval` or `point`)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerConfig {
    pub delta: f64,
    pub mode: Mode,
    pub fluent_count_override: Option<usize>,
    pub action_count_override: Option<usize>,
}

impl LearnerConfig {
    pub fn new(delta: f64, mode: Mode) -> Result<Self, LearnError> {
        let cfg = LearnerConfig { delta, mode, fluent_count_override: None, action_count_override: None };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn with_counts(mut self, fluents: Option<usize>, actions: Option<usize>) -> Self {
        self.fluent_count_override = fluents;
        self.action_count_override = actions;
        self
    }

    fn check(&self) -> Result<(), LearnError> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(LearnError::InvalidConfig(format!("delta must lie in (0,1), got {}", self.delta)));
        }
        if self.fluent_count_override == Some(0) || self.action_count_override == Some(0) {
            return Err(LearnError::InvalidConfig("count overrides must be positive".into()));
        }
        Ok(())
    }
}

/// Weighted counts `#(ℓ ∈ s′∖s)` and `#(ℓ ∉ s)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct EffectCounts {
    pub added: u64,
    pub eligible: u64,
}

impl Add for EffectCounts {
    type Output = EffectCounts;

    fn add(self, rhs: Self) -> Self {
        EffectCounts { added: self.added + rhs.added, eligible: self.eligible + rhs.eligible }
    }
}

impl AddAssign for EffectCounts {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

/// Closed interval `0 ≤ low ≤ high ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CredalInterval {
    low: f64,
    high: f64,
}

impl CredalInterval {
    pub const VACUOUS: CredalInterval = CredalInterval { low: 0.0, high: 1.0 };

    pub fn new(low: f64, high: f64) -> Option<Self> {
        (0.0 <= low && low <= high && high <= 1.0).then_some(CredalInterval { low, high })
    }

    fn clipped(low: f64, high: f64) -> Self {
        CredalInterval { low: low.clamp(0.0, 1.0), high: high.clamp(0.0, 1.0) }
    }

    pub fn low(&self) -> f64 {
        self.low
    }

    pub fn high(&self) -> f64 {
        self.high
    }

    pub fn contains(&self, p: f64) -> bool {
        self.low <= p && p <= self.high
    }

    pub fn is_vacuous(&self) -> bool {
        *self == Self::VACUOUS
    }
}

impl fmt::Display for CredalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.low, self.high)
    }
}

/// `√(ln(2/δ) / 2n)`.
pub fn hoeffding_half_width(eligible: u64, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * eligible as f64)).sqrt()
}

pub fn credal_interval(c: EffectCounts, delta: f64) -> CredalInterval {
    if c.eligible == 0 {
        return CredalInterval::VACUOUS;
    }
    if c.added > 0 {
        let center = c.added as f64 / c.eligible as f64;
        let hw = hoeffding_half_width(c.eligible, delta);
        CredalInterval::clipped(center - hw, center + hw)
    } else {
        CredalInterval::clipped(0.0, (1.0 / delta).ln() / c.eligible as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointEstimate {
    /// `added / eligible`, for effects seen at least once.
    Exact(Rational),
    /// The never-observed estimate, already capped at 1.
    Unobserved(f64),
    /// `eligible = 0`: the data says nothing.
    Unconstrained,
}

impl PointEstimate {
    pub fn value(&self) -> Option<f64> {
        match self {
            PointEstimate::Exact(r) => Some(crate::model::to_f64(r)),
            PointEstimate::Unobserved(x) => Some(*x),
            PointEstimate::Unconstrained => None,
        }
    }
}

pub fn point_estimate(c: EffectCounts, delta: f64, fluent_count: usize, action_count: usize) -> PointEstimate {
    if c.eligible == 0 {
        PointEstimate::Unconstrained
    } else if c.added > 0 {
        PointEstimate::Exact(Rational::new(c.added.into(), c.eligible.into()))
    } else {
        let x = (2.0 * fluent_count as f64 * action_count as f64 / delta).ln() / (2.0 * c.eligible as f64);
        PointEstimate::Unobserved(x.clamp(0.0, 1.0))
    }
}

/// Intersection of the literal sets of all pre-states; `None` when there are no triplets.
pub fn learn_preconditions(triplets: &[WeightedTriplet<'_>]) -> Option<BTreeSet<Literal>> {
    let (first, rest) = triplets.split_first()?;
    let mut keep: Vec<bool> = vec![true; first.pre.values().len()];
    for t in rest {
        for (k, (a, b)) in keep.iter_mut().zip(first.pre.values().iter().zip(t.pre.values())) {
            *k &= a == b;
        }
    }
    Some(first.pre.literals().into_iter().zip(keep).filter(|(_, k)| *k).map(|(l, _)| l).collect())
}

pub fn count_effects(triplets: &[WeightedTriplet<'_>], lit: &Literal) -> EffectCounts {
    triplets.iter().fold(EffectCounts::default(), |mut acc, t| {
        if !t.pre.holds(lit).unwrap_or(true) {
            acc.eligible += t.weight;
            if t.post.holds(lit).unwrap_or(false) {
                acc.added += t.weight;
            }
        }
        acc
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectEstimate {
    pub counts: EffectCounts,
    pub interval: CredalInterval,
    pub point: PointEstimate,
    /// ℓ was added in at least one triplet.
    pub observed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnedAction {
    pub name: String,
    pub preconditions: BTreeSet<Literal>,
    /// One entry per literal of the vocabulary, both polarities.
    pub effects: BTreeMap<Literal, EffectEstimate>,
    /// Total weight of the action's triplets.
    pub support: u64,
}

impl LearnedAction {
    pub fn effect(&self, lit: &Literal) -> Option<&EffectEstimate> {
        self.effects.get(lit)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnedModel {
    pub domain_name: String,
    pub vocabulary: Arc<Vocabulary>,
    pub actions: Vec<LearnedAction>,
    /// Declared in the supplied domain but never observed.
    pub unobserved_actions: Vec<String>,
    pub config: LearnerConfig,
    pub fluent_count: usize,
    pub action_count: usize,
    pub trajectories: usize,
    pub total_weight: u64,
}

impl LearnedModel {
    pub fn action(&self, name: &str) -> Option<&LearnedAction> {
        let name = name.to_lowercase();
        self.actions.iter().find(|a| a.name == name)
    }
}

/// Learns a model from `ts`. With a domain, its vocabulary, action list and
/// signature sizes are used; otherwise they are inferred from `ts`.
pub fn learn(ts: &TrajectorySet, cfg: &LearnerConfig, domain: Option<&Domain>) -> Result<LearnedModel, LearnError> {
    cfg.check()?;
    if ts.is_empty() {
        return Err(LearnError::Empty);
    }
    let observed = ts.action_names();
    let (ts, names, unobserved, vocabulary, domain_name, f_count, a_count) = match domain {
        Some(d) => {
            let ts = ts.with_vocabulary(&d.vocabulary)?;
            let unknown: Vec<String> = observed.iter().filter(|a| d.action(a).is_none()).cloned().collect();
            if !unknown.is_empty() {
                return Err(LearnError::UnknownActions(unknown));
            }
            let (seen, unseen): (Vec<_>, Vec<_>) =
                d.actions.iter().map(|a| a.name.clone()).partition(|n| observed.contains(n));
            (ts, seen, unseen, d.vocabulary.clone(), format!("{}-learned", d.name), d.fluent_count(), d.action_count())
        }
        None => {
            let vocab = ts.vocabulary().expect("nonempty set").clone();
            let (f, a) = (vocab.len(), observed.len());
            (ts.clone(), observed, Vec::new(), vocab, "learned".to_string(), f, a)
        }
    };
    let fluent_count = cfg.fluent_count_override.unwrap_or(f_count);
    let action_count = cfg.action_count_override.unwrap_or(a_count);
    let literals = vocabulary.all_literals();

    let actions: Vec<LearnedAction> = names
        .par_iter()
        .map(|name| {
            let triplets = ts.triplets_for(name);
            let preconditions = learn_preconditions(&triplets).expect("observed action has triplets");
            let effects = literals
                .iter()
                .map(|l| {
                    let counts = count_effects(&triplets, l);
                    let estimate = EffectEstimate {
                        counts,
                        interval: credal_interval(counts, cfg.delta),
                        point: point_estimate(counts, cfg.delta, fluent_count, action_count),
                        observed: counts.added > 0,
                    };
                    (l.clone(), estimate)
                })
                .collect();
            LearnedAction {
                name: name.clone(),
                preconditions,
                effects,
                support: triplets.iter().map(|t| t.weight).sum(),
            }
        })
        .collect();

    Ok(LearnedModel {
        domain_name,
        vocabulary,
        actions,
        unobserved_actions: unobserved,
        config: cfg.clone(),
        fluent_count,
        action_count,
        trajectories: ts.len(),
        total_weight: ts.entries().iter().map(|(_, w)| w).sum(),
    })
}

pub const LEARNED_REQUIREMENTS: [&str; 3] =
    [":negative-preconditions", ":conditional-effects", ":probabilistic-effects"];

/// Converts a learned model into a domain in the configured mode.
///
/// Factors are guarded by `(when ¬ℓ ...)`; the guard is left out only for
/// certain effects whose preconditions already require ¬ℓ. Vacuous
/// intervals and unconstrained or zero point estimates are omitted.
/// Float-valued bounds are rounded to `precision` decimals.
pub fn emit_learned(model: &LearnedModel, precision: u32) -> Domain {
    let vocab = &model.vocabulary;
    let actions = model
        .actions
        .iter()
        .map(|a| {
            let mut effect = Vec::new();
            for lit in vocab.all_literals() {
                let est = &a.effects[&lit];
                let probability = match model.config.mode {
                    Mode::Interval => {
                        if est.interval.is_vacuous() {
                            continue;
                        }
                        Probability::Interval {
                            low: round_to_decimals(est.interval.low(), precision),
                            high: round_to_decimals(est.interval.high(), precision),
                        }
                    }
                    Mode::Point => match &est.point {
                        PointEstimate::Unconstrained => continue,
                        PointEstimate::Exact(r) if r.is_zero() => continue,
                        PointEstimate::Exact(r) => Probability::Point(r.clone()),
                        PointEstimate::Unobserved(x) => {
                            let r = round_to_decimals(*x, precision);
                            if r.is_zero() {
                                continue;
                            }
                            Probability::Point(r)
                        }
                    },
                };
                let guard = lit.negate();
                let implied = a.preconditions.contains(&guard) && probability.is_certain();
                let condition = if implied { BTreeSet::new() } else { [guard].into() };
                effect.push(EffectFactor { condition, probability, added: lit });
            }
            ActionSchema { name: a.name.clone(), precondition: a.preconditions.clone(), effect }
        })
        .collect();
    Domain {
        name: model.domain_name.clone(),
        requirements: LEARNED_REQUIREMENTS.iter().map(|s| s.to_string()).collect(),
        vocabulary: vocab.clone(),
        actions,
    }
}

/// PPDDL text of the learned model with a descriptive comment header.
pub fn render_learned(model: &LearnedModel, precision: u32) -> String {
    let mut out = format!(
        "; learned from {} trajectories (total weight {}), delta={}, mode={}, |F|={}, |A|={}\n",
        model.trajectories,
        model.total_weight,
        model.config.delta,
        model.config.mode,
        model.fluent_count,
        model.action_count
    );
    if model.actions.is_empty() {
        out.push_str("; no observed actions\n");
    }
    if !model.unobserved_actions.is_empty() {
        out.push_str(&format!("; unobserved actions: {}\n", model.unobserved_actions.join(" ")));
    }
    out.push_str(&emit_domain(&emit_learned(model, precision), precision));
    out
}
