//! Propositional planning data model: fluents, literals, total states,
//! action schemas with factored stochastic effects, domains and problems.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational used for declared probabilities.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown fluent `{0}`")]
    UnknownFluent(String),
    #[error("duplicate fluent `{0}`")]
    DuplicateFluent(String),
    #[error("invalid fluent name `{0}`")]
    InvalidFluentName(String),
    #[error("states are defined over different vocabularies")]
    VocabularyMismatch,
    #[error("duplicate action `{0}`")]
    DuplicateAction(String),
    #[error("action `{action}` requires both `{fluent}` and its negation")]
    ContradictoryPrecondition { action: String, fluent: String },
    #[error("invalid probability: {0}")]
    InvalidProbability(String),
}

/// A boolean state variable. Names are stored lower-cased.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fluent(String);

impl Fluent {
    pub fn new(name: &str) -> Result<Self, ModelError> {
        if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == '(' || c == ')' || c == ';') {
            return Err(ModelError::InvalidFluentName(name.to_string()));
        }
        Ok(Fluent(name.to_lowercase()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Fluent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A fluent with a polarity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub fluent: Fluent,
    pub positive: bool,
}

impl Literal {
    pub fn pos(fluent: Fluent) -> Self {
        Literal { fluent, positive: true }
    }

    pub fn neg(fluent: Fluent) -> Self {
        Literal { fluent, positive: false }
    }

    pub fn negate(&self) -> Self {
        Literal { fluent: self.fluent.clone(), positive: !self.positive }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "({})", self.fluent)
        } else {
            write!(f, "(not ({}))", self.fluent)
        }
    }
}

/// Ordered fluent vocabulary. Declaration order drives all serialized output.
#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    fluents: Vec<Fluent>,
    index: HashMap<Fluent, usize>,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.fluents == other.fluents
    }
}

impl Eq for Vocabulary {}

impl Vocabulary {
    pub fn new(fluents: Vec<Fluent>) -> Result<Self, ModelError> {
        let mut index = HashMap::with_capacity(fluents.len());
        for (i, f) in fluents.iter().enumerate() {
            if index.insert(f.clone(), i).is_some() {
                return Err(ModelError::DuplicateFluent(f.name().to_string()));
            }
        }
        Ok(Vocabulary { fluents, index })
    }

    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self, ModelError> {
        let fluents = names.iter().map(|n| Fluent::new(n.as_ref())).collect::<Result<Vec<_>, _>>()?;
        Self::new(fluents)
    }

    pub fn len(&self) -> usize {
        self.fluents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fluents.is_empty()
    }

    pub fn fluents(&self) -> &[Fluent] {
        &self.fluents
    }

    pub fn index_of(&self, fluent: &Fluent) -> Option<usize> {
        self.index.get(fluent).copied()
    }

    pub fn lookup(&self, name: &str) -> Option<&Fluent> {
        let key = Fluent(name.to_lowercase());
        self.index.get(&key).map(|&i| &self.fluents[i])
    }

    pub fn contains(&self, fluent: &Fluent) -> bool {
        self.index.contains_key(fluent)
    }

    pub fn check(&self, lit: &Literal) -> Result<usize, ModelError> {
        self.index_of(&lit.fluent).ok_or_else(|| ModelError::UnknownFluent(lit.fluent.name().to_string()))
    }

    /// Every literal over the vocabulary: for each fluent, positive then negative.
    pub fn all_literals(&self) -> Vec<Literal> {
        self.fluents.iter().flat_map(|f| [Literal::pos(f.clone()), Literal::neg(f.clone())]).collect()
    }

    /// Sorts literals by declaration order, positive before negative.
    /// Unknown fluents sort last, by name.
    pub fn sorted<'a, I>(&self, lits: I) -> Vec<&'a Literal>
    where
        I: IntoIterator<Item = &'a Literal>,
    {
        let mut v: Vec<&Literal> = lits.into_iter().collect();
        v.sort_by_key(|l| (self.index_of(&l.fluent).unwrap_or(usize::MAX), l.fluent.clone(), !l.positive));
        v
    }
}

/// A total truth assignment over a vocabulary.
#[derive(Debug, Clone)]
pub struct State {
    vocab: Arc<Vocabulary>,
    values: Vec<bool>,
}

impl PartialEq for State {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.vocab, &other.vocab) || self.vocab == other.vocab) && self.values == other.values
    }
}

impl Eq for State {}

impl State {
    /// All fluents false.
    pub fn all_false(vocab: Arc<Vocabulary>) -> Self {
        let values = vec![false; vocab.len()];
        State { vocab, values }
    }

    pub fn from_values(vocab: Arc<Vocabulary>, values: Vec<bool>) -> Result<Self, ModelError> {
        if values.len() != vocab.len() {
            return Err(ModelError::VocabularyMismatch);
        }
        Ok(State { vocab, values })
    }

    /// Closed-world construction: listed fluents true, everything else false.
    pub fn from_true<'a, I>(vocab: Arc<Vocabulary>, trues: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = &'a Fluent>,
    {
        let mut s = State::all_false(vocab);
        for f in trues {
            let i = s.vocab.index_of(f).ok_or_else(|| ModelError::UnknownFluent(f.name().to_string()))?;
            s.values[i] = true;
        }
        Ok(s)
    }

    pub fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn get(&self, fluent: &Fluent) -> Result<bool, ModelError> {
        self.vocab
            .index_of(fluent)
            .map(|i| self.values[i])
            .ok_or_else(|| ModelError::UnknownFluent(fluent.name().to_string()))
    }

    pub fn set(&mut self, lit: &Literal) -> Result<(), ModelError> {
        let i = self.vocab.check(lit)?;
        self.values[i] = lit.positive;
        Ok(())
    }

    /// `ℓ ∈ s`.
    pub fn holds(&self, lit: &Literal) -> Result<bool, ModelError> {
        Ok(self.get(&lit.fluent)? == lit.positive)
    }

    /// True iff every literal matches the assignment.
    pub fn satisfies<'a, I>(&self, lits: I) -> Result<bool, ModelError>
    where
        I: IntoIterator<Item = &'a Literal>,
    {
        let mut ok = true;
        for l in lits {
            // keep going so unknown fluents are always reported
            ok &= self.holds(l)?;
        }
        Ok(ok)
    }

    /// The literal-set view, in declaration order.
    pub fn literals(&self) -> Vec<Literal> {
        self.vocab
            .fluents()
            .iter()
            .zip(&self.values)
            .map(|(f, &v)| Literal { fluent: f.clone(), positive: v })
            .collect()
    }

    pub fn literal_set(&self) -> BTreeSet<Literal> {
        self.literals().into_iter().collect()
    }

    pub fn true_fluents(&self) -> impl Iterator<Item = &Fluent> {
        self.vocab.fluents().iter().zip(&self.values).filter(|(_, &v)| v).map(|(f, _)| f)
    }

    /// Literals true in `post` and false in `self`.
    pub fn diff(&self, post: &State) -> Result<BTreeSet<Literal>, ModelError> {
        if !(Arc::ptr_eq(&self.vocab, &post.vocab) || self.vocab == post.vocab) {
            return Err(ModelError::VocabularyMismatch);
        }
        Ok(post
            .literals()
            .into_iter()
            .zip(&self.values)
            .filter(|(l, &before)| l.positive != before)
            .map(|(l, _)| l)
            .collect())
    }

    /// Re-expresses the state over another vocabulary with the same fluent set.
    pub fn remap(&self, target: &Arc<Vocabulary>) -> Result<State, ModelError> {
        if target.len() != self.vocab.len() {
            return Err(ModelError::VocabularyMismatch);
        }
        let mut values = vec![false; target.len()];
        for (f, &v) in self.vocab.fluents().iter().zip(&self.values) {
            let i = target.index_of(f).ok_or(ModelError::VocabularyMismatch)?;
            values[i] = v;
        }
        Ok(State { vocab: target.clone(), values })
    }
}

/// `state_satisfies(s, lits)`.
pub fn state_satisfies(s: &State, lits: &BTreeSet<Literal>) -> Result<bool, ModelError> {
    s.satisfies(lits)
}

/// `literal_diff(s, s2)`: the literals true in `s2` and false in `s`.
pub fn literal_diff(s: &State, s2: &State) -> Result<BTreeSet<Literal>, ModelError> {
    s.diff(s2)
}

/// Effect probability: a point value or a closed interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Probability {
    Point(Rational),
    Interval { low: Rational, high: Rational },
}

impl Probability {
    pub fn point(p: Rational) -> Result<Self, ModelError> {
        check_unit(&p)?;
        Ok(Probability::Point(p))
    }

    pub fn interval(low: Rational, high: Rational) -> Result<Self, ModelError> {
        check_unit(&low)?;
        check_unit(&high)?;
        if low > high {
            return Err(ModelError::InvalidProbability(format!("interval low {low} exceeds high {high}")));
        }
        Ok(Probability::Interval { low, high })
    }

    pub fn certain() -> Self {
        Probability::Point(Rational::one())
    }

    pub fn is_certain(&self) -> bool {
        matches!(self, Probability::Point(p) if p.is_one())
    }

    /// Bounds as floats; a point gives a degenerate interval.
    pub fn bounds_f64(&self) -> (f64, f64) {
        match self {
            Probability::Point(p) => {
                let v = to_f64(p);
                (v, v)
            }
            Probability::Interval { low, high } => (to_f64(low), to_f64(high)),
        }
    }
}

fn check_unit(p: &Rational) -> Result<(), ModelError> {
    if *p < Rational::zero() || *p > Rational::one() {
        return Err(ModelError::InvalidProbability(format!("{p} is outside [0,1]")));
    }
    Ok(())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Nearest rational with `decimals` decimal places (ties away from zero).
/// Non-finite inputs are clamped into [0,1].
pub fn round_to_decimals(x: f64, decimals: u32) -> Rational {
    let x = if x.is_nan() { 0.0 } else { x.clamp(0.0, 1.0) };
    let exact = Rational::from_float(x).unwrap_or_else(Rational::zero);
    round_rational(&exact, decimals)
}

pub fn round_rational(r: &Rational, decimals: u32) -> Rational {
    let scale = BigInt::from(10u32).pow(decimals);
    let scaled = r * Rational::from_integer(scale.clone());
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    let rounded = if scaled >= Rational::zero() { (scaled + half).floor() } else { (scaled - half).ceil() };
    Rational::new(rounded.to_integer(), scale)
}

/// One independently firing effect: if `condition` holds in the pre-state,
/// `added` becomes true with the given probability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectFactor {
    pub condition: BTreeSet<Literal>,
    pub probability: Probability,
    pub added: Literal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub precondition: BTreeSet<Literal>,
    pub effect: Vec<EffectFactor>,
}

impl ActionSchema {
    pub fn applicable(&self, s: &State) -> Result<bool, ModelError> {
        s.satisfies(&self.precondition)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    pub name: String,
    pub requirements: Vec<String>,
    pub vocabulary: Arc<Vocabulary>,
    pub actions: Vec<ActionSchema>,
}

impl Domain {
    /// Builds a domain after checking its invariants.
    pub fn new(
        name: impl Into<String>,
        requirements: Vec<String>,
        vocabulary: Arc<Vocabulary>,
        actions: Vec<ActionSchema>,
    ) -> Result<Self, ModelError> {
        let d = Domain { name: name.into(), requirements, vocabulary, actions };
        d.check()?;
        Ok(d)
    }

    pub fn check(&self) -> Result<(), ModelError> {
        let mut names = HashSet::new();
        for a in &self.actions {
            if !names.insert(a.name.as_str()) {
                return Err(ModelError::DuplicateAction(a.name.clone()));
            }
            for l in &a.precondition {
                self.vocabulary.check(l)?;
                if a.precondition.contains(&l.negate()) {
                    return Err(ModelError::ContradictoryPrecondition {
                        action: a.name.clone(),
                        fluent: l.fluent.name().to_string(),
                    });
                }
            }
            for fac in &a.effect {
                self.vocabulary.check(&fac.added)?;
                for l in &fac.condition {
                    self.vocabulary.check(l)?;
                }
                match &fac.probability {
                    Probability::Point(p) => check_unit(p)?,
                    Probability::Interval { low, high } => {
                        check_unit(low)?;
                        check_unit(high)?;
                        if low > high {
                            return Err(ModelError::InvalidProbability(format!(
                                "interval low {low} exceeds high {high}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn action(&self, name: &str) -> Option<&ActionSchema> {
        let name = name.to_lowercase();
        self.actions.iter().find(|a| a.name == name)
    }

    pub fn fluent_count(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub name: String,
    pub domain_name: Option<String>,
    pub init: State,
    pub goal: BTreeSet<Literal>,
}

impl Problem {
    pub fn goal_reached(&self, s: &State) -> Result<bool, ModelError> {
        s.satisfies(&self.goal)
    }
}
