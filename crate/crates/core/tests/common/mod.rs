#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use samplus_core::model::{ActionSchema, EffectFactor, Rational};
use samplus_core::{fixtures, parse_domain, parse_trajectories, Domain, Fluent, Literal, Probability, State};
use samplus_core::{Trajectory, TrajectorySet, Vocabulary};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn coffee() -> Domain {
    parse_domain(fixtures::COFFEE_DOMAIN).unwrap()
}

pub fn table(text: &str) -> TrajectorySet {
    parse_trajectories(text, Some(&coffee().vocabulary)).unwrap()
}

pub fn lit(s: &str) -> Literal {
    match s.strip_prefix('-') {
        Some(name) => Literal::neg(Fluent::new(name).unwrap()),
        None => Literal::pos(Fluent::new(s).unwrap()),
    }
}

pub fn lits(xs: &[&str]) -> BTreeSet<Literal> {
    xs.iter().map(|s| lit(s)).collect()
}

const RESERVED: [&str; 6] = ["and", "not", "when", "probabilistic", "probabilistic-interval", "define"];

fn name(rng: &mut ChaCha8Rng, prefix: &str, taken: &[String]) -> String {
    const ALPHABET: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789-_";
    loop {
        let len = rng.random_range(0..7);
        let tail: String = (0..len).map(|_| *ALPHABET.choose(rng).unwrap() as char).collect();
        let n = format!("{prefix}{tail}");
        if !taken.contains(&n) && !RESERVED.contains(&n.as_str()) {
            return n;
        }
    }
}

pub fn vocabulary(rng: &mut ChaCha8Rng, max: usize) -> Arc<Vocabulary> {
    let mut names = Vec::new();
    for _ in 0..rng.random_range(1..=max) {
        let prefix = ["p", "q", "at-", "has-"].choose(rng).unwrap();
        names.push(name(rng, prefix, &names));
    }
    Arc::new(Vocabulary::from_names(&names).unwrap())
}

pub fn action_names(rng: &mut ChaCha8Rng, max: usize) -> Vec<String> {
    let mut names = Vec::new();
    for _ in 0..rng.random_range(1..=max) {
        names.push(name(rng, "act", &names));
    }
    names
}

/// A consistent random literal set over `vocab`.
pub fn literal_set(rng: &mut ChaCha8Rng, vocab: &Vocabulary, p: f64) -> BTreeSet<Literal> {
    let mut out = BTreeSet::new();
    for f in vocab.fluents() {
        if rng.random_bool(p) {
            out.insert(if rng.random_bool(0.5) { Literal::pos(f.clone()) } else { Literal::neg(f.clone()) });
        }
    }
    out
}

pub fn random_state(rng: &mut ChaCha8Rng, vocab: &Arc<Vocabulary>) -> State {
    let values = (0..vocab.len()).map(|_| rng.random_bool(0.5)).collect();
    State::from_values(vocab.clone(), values).unwrap()
}

fn unit_rational(rng: &mut ChaCha8Rng) -> Rational {
    let d: i64 = rng.random_range(1..=1000);
    let n: i64 = rng.random_range(0..=d);
    Rational::new(n.into(), d.into())
}

pub fn probability(rng: &mut ChaCha8Rng) -> Probability {
    match rng.random_range(0..3) {
        0 => Probability::certain(),
        1 => Probability::point(unit_rational(rng)).unwrap(),
        _ => {
            let (a, b) = (unit_rational(rng), unit_rational(rng));
            let (low, high) = if a <= b { (a, b) } else { (b, a) };
            Probability::interval(low, high).unwrap()
        }
    }
}

/// A random domain exercising every construct the emitter can produce.
pub fn random_domain(rng: &mut ChaCha8Rng) -> Domain {
    let vocab = vocabulary(rng, 5);
    let requirements = [":negative-preconditions", ":conditional-effects", ":probabilistic-effects"]
        .iter()
        .filter(|_| rng.random_bool(0.5))
        .map(|s| s.to_string())
        .collect();
    let actions = action_names(rng, 4)
        .into_iter()
        .map(|name| {
            let precondition = literal_set(rng, &vocab, 0.4);
            let effect = (0..rng.random_range(0..5))
                .map(|_| {
                    let f = vocab.fluents().choose(rng).unwrap().clone();
                    let added = if rng.random_bool(0.5) { Literal::pos(f) } else { Literal::neg(f) };
                    let condition = if rng.random_bool(0.5) { literal_set(rng, &vocab, 0.3) } else { BTreeSet::new() };
                    EffectFactor { condition, probability: probability(rng), added }
                })
                .collect();
            ActionSchema { name, precondition, effect }
        })
        .collect();
    let name = name(rng, "dom", &[]);
    Domain::new(name, requirements, vocab, actions).unwrap()
}

/// A micro-domain signature plus a weighted trajectory multiset over it.
pub struct Micro {
    pub vocab: Arc<Vocabulary>,
    pub actions: Vec<String>,
    pub set: TrajectorySet,
}

impl Micro {
    pub fn domain(&self) -> Domain {
        let actions = self
            .actions
            .iter()
            .map(|a| ActionSchema { name: a.clone(), precondition: BTreeSet::new(), effect: Vec::new() })
            .collect();
        Domain::new("micro", Vec::new(), self.vocab.clone(), actions).unwrap()
    }
}

pub fn micro(rng: &mut ChaCha8Rng) -> Micro {
    let vocab = vocabulary(rng, 3);
    let actions = action_names(rng, 3);
    let mut set = TrajectorySet::new();
    for i in 0..rng.random_range(1..=6) {
        let steps = rng.random_range(1..=4);
        let states = (0..=steps).map(|_| random_state(rng, &vocab)).collect();
        let acts = (0..steps).map(|_| actions.choose(rng).unwrap().clone()).collect();
        set.push(Trajectory::new(format!("t{i}"), states, acts).unwrap(), rng.random_range(1..=5)).unwrap();
    }
    Micro { vocab, actions, set }
}
