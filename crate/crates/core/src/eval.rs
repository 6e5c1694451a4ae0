//! Comparison of a learned domain against a ground-truth domain.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::{to_f64, Domain, EffectFactor, Literal, Probability};

pub const EVAL_SCHEMA: &str = "samplus-eval/1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("fluents differ between learned and truth domains: {0:?}")]
    Vocabulary(Vec<String>),
    #[error("truth action `{0}` has an interval-valued effect")]
    IntervalTruth(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LearnedKind {
    Point,
    Interval,
    /// No factor for this literal: treated as the vacuous interval [0,1].
    Absent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiteralEval {
    pub literal: String,
    /// Probability that the action adds the literal when it is false beforehand.
    pub truth: f64,
    /// Some truth factor for this literal depends on other fluents and was skipped.
    pub truth_conditional: bool,
    pub kind: LearnedKind,
    pub low: f64,
    pub high: f64,
    pub contained: bool,
    /// `|truth − p|` for points, distance to the interval otherwise.
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActionEval {
    pub action: String,
    /// Every state allowed by the learned preconditions is allowed by the truth.
    pub preconditions_safe: bool,
    pub missing_preconditions: Vec<String>,
    pub literals: Vec<LiteralEval>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub schema: &'static str,
    pub actions: Vec<ActionEval>,
    /// Learned actions with no counterpart in the truth domain.
    pub extra_actions: Vec<String>,
    /// Truth actions missing from the learned domain.
    pub unlearned_actions: Vec<String>,
    pub contained: usize,
    pub total: usize,
}

pub fn evaluate(learned: &Domain, truth: &Domain) -> Result<EvalReport, EvalError> {
    let lv = &learned.vocabulary;
    let tv = &truth.vocabulary;
    let mut mismatch: Vec<String> = tv.fluents().iter().filter(|f| !lv.contains(f)).map(|f| f.to_string()).collect();
    mismatch.extend(lv.fluents().iter().filter(|f| !tv.contains(f)).map(|f| f.to_string()));
    if !mismatch.is_empty() {
        return Err(EvalError::Vocabulary(mismatch));
    }

    let mut report = EvalReport {
        schema: EVAL_SCHEMA,
        actions: Vec::new(),
        extra_actions: learned
            .actions
            .iter()
            .filter(|a| truth.action(&a.name).is_none())
            .map(|a| a.name.clone())
            .collect(),
        unlearned_actions: Vec::new(),
        contained: 0,
        total: 0,
    };
    for ta in &truth.actions {
        let Some(la) = learned.action(&ta.name) else {
            report.unlearned_actions.push(ta.name.clone());
            continue;
        };
        let missing: Vec<String> =
            tv.sorted(ta.precondition.difference(&la.precondition)).into_iter().map(|l| l.to_string()).collect();
        let mut literals = Vec::new();
        for lit in tv.all_literals() {
            let (truth_p, conditional) = truth_probability(&ta.effect, &ta.precondition, &lit)
                .map_err(|_| EvalError::IntervalTruth(ta.name.clone()))?;
            let (kind, low, high) = learned_bounds(&la.effect, &la.precondition, &lit);
            let contained = low <= truth_p && truth_p <= high;
            let abs_error = match kind {
                LearnedKind::Point => (truth_p - low).abs(),
                _ if contained => 0.0,
                _ => (low - truth_p).max(truth_p - high),
            };
            report.total += 1;
            report.contained += contained as usize;
            literals.push(LiteralEval {
                literal: lit.to_string(),
                truth: truth_p,
                truth_conditional: conditional,
                kind,
                low,
                high,
                contained,
                abs_error,
            });
        }
        report.actions.push(ActionEval {
            action: ta.name.clone(),
            preconditions_safe: missing.is_empty(),
            missing_preconditions: missing,
            literals,
        });
    }
    Ok(report)
}

/// Factors adding `lit` whose condition is implied by `pre ∪ {¬lit}`.
fn relevant<'a>(effect: &'a [EffectFactor], pre: &BTreeSet<Literal>, lit: &Literal) -> (Vec<&'a EffectFactor>, bool) {
    let absent = lit.negate();
    let mut skipped = false;
    let hits = effect
        .iter()
        .filter(|f| f.added == *lit)
        .filter(|f| {
            let implied = f.condition.iter().all(|c| *c == absent || pre.contains(c));
            skipped |= !implied;
            implied
        })
        .collect();
    (hits, skipped)
}

fn truth_probability(effect: &[EffectFactor], pre: &BTreeSet<Literal>, lit: &Literal) -> Result<(f64, bool), ()> {
    let (hits, skipped) = relevant(effect, pre, lit);
    let mut miss = 1.0;
    for f in hits {
        match &f.probability {
            Probability::Point(p) => miss *= 1.0 - to_f64(p),
            Probability::Interval { .. } => return Err(()),
        }
    }
    Ok((1.0 - miss, skipped))
}

fn learned_bounds(effect: &[EffectFactor], pre: &BTreeSet<Literal>, lit: &Literal) -> (LearnedKind, f64, f64) {
    let (hits, _) = relevant(effect, pre, lit);
    match hits.as_slice() {
        [] => (LearnedKind::Absent, 0.0, 1.0),
        [only] => {
            let (low, high) = only.probability.bounds_f64();
            let kind = match only.probability {
                Probability::Point(_) => LearnedKind::Point,
                Probability::Interval { .. } => LearnedKind::Interval,
            };
            (kind, low, high)
        }
        many => {
            let (mut miss_low, mut miss_high) = (1.0, 1.0);
            let mut all_points = true;
            for f in many {
                let (low, high) = f.probability.bounds_f64();
                miss_low *= 1.0 - low;
                miss_high *= 1.0 - high;
                all_points &= matches!(f.probability, Probability::Point(_));
            }
            let kind = if all_points { LearnedKind::Point } else { LearnedKind::Interval };
            (kind, 1.0 - miss_low, 1.0 - miss_high)
        }
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.actions {
            let pre = if a.preconditions_safe {
                "safe".to_string()
            } else {
                format!("UNSAFE (missing {})", a.missing_preconditions.join(" "))
            };
            writeln!(f, "{}: preconditions {}", a.action, pre)?;
            for l in &a.literals {
                let learned = match l.kind {
                    LearnedKind::Point => format!("{:.6}", l.low),
                    _ => format!("[{:.6}, {:.6}]", l.low, l.high),
                };
                writeln!(
                    f,
                    "  {:<28} truth {:.6}  learned {:<22} {}  error {:.6}{}",
                    l.literal,
                    l.truth,
                    learned,
                    if l.contained { "contained" } else { "OUTSIDE  " },
                    l.abs_error,
                    if l.truth_conditional { "  (conditional truth factors skipped)" } else { "" }
                )?;
            }
        }
        if !self.unlearned_actions.is_empty() {
            writeln!(f, "not learned: {}", self.unlearned_actions.join(" "))?;
        }
        if !self.extra_actions.is_empty() {
            writeln!(f, "not in truth: {}", self.extra_actions.join(" "))?;
        }
        write!(f, "{}/{} truth probabilities contained", self.contained, self.total)
    }
}
