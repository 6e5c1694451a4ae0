mod common;

use common::*;
use proptest::prelude::*;
use samplus_core::learner::hoeffding_half_width;
use samplus_core::model::Rational;
use samplus_core::{
    credal_interval, emit_domain, emit_trajectories, learn, parse_domain, parse_problem, parse_trajectories,
    point_estimate, EffectCounts, LearnerConfig, Mode, PointEstimate,
};

fn counts() -> impl Strategy<Value = EffectCounts> {
    (1u64..5000).prop_flat_map(|eligible| (0..=eligible).prop_map(move |added| EffectCounts { added, eligible }))
}

fn delta() -> impl Strategy<Value = f64> {
    0.001f64..0.999
}

/// Re-spaces emitted text: every run of whitespace becomes a random mix of
/// spaces, tabs, newlines and line comments.
fn respace(text: &str, seeds: &[u8]) -> String {
    let mut out = String::new();
    let mut k = 0;
    let mut in_space = false;
    for c in text.chars() {
        if c.is_whitespace() {
            if !in_space {
                let s = seeds[k % seeds.len()];
                k += 1;
                out.push_str(match s % 4 {
                    0 => " ",
                    1 => "\t ",
                    2 => "\n\n   ",
                    _ => " ; (a comment) with (parens\n",
                });
            }
            in_space = true;
        } else {
            in_space = false;
            out.push(c);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn parsers_are_total(text in "\\PC{0,200}") {
        let _ = parse_domain(&text);
        let _ = parse_trajectories(&text, None);
        let _ = parse_problem(&text, &coffee());
    }

    #[test]
    fn parsers_are_total_on_near_misses(seed in any::<u64>(), cut in 0usize..4000, junk in "[()a-z :;\\-0-9./]{0,8}") {
        let text = emit_domain(&random_domain(&mut rng(seed)), 6);
        let cut = text.char_indices().map(|(i, _)| i).nth(cut % text.len()).unwrap_or(0);
        let mangled = format!("{}{}{}", &text[..cut], junk, &text[cut..]);
        if let Err(e) = parse_domain(&mangled) {
            prop_assert!(!e.message.is_empty());
        }
    }

    #[test]
    fn whitespace_and_comments_are_insignificant(seed in any::<u64>(), spaces in prop::collection::vec(any::<u8>(), 1..16)) {
        let d = random_domain(&mut rng(seed));
        let text = emit_domain(&d, 6);
        let a = parse_domain(&text).unwrap();
        let b = parse_domain(&respace(&text, &spaces)).unwrap();
        prop_assert_eq!(emit_domain(&a, 6), emit_domain(&b, 6));
    }

    #[test]
    fn emission_is_a_fixed_point(seed in any::<u64>()) {
        let text = emit_domain(&random_domain(&mut rng(seed)), 6);
        prop_assert_eq!(emit_domain(&parse_domain(&text).unwrap(), 6), text);
    }

    #[test]
    fn trajectory_text_round_trips(seed in any::<u64>()) {
        let m = micro(&mut rng(seed));
        let text = emit_trajectories(&m.set);
        let back = parse_trajectories(&text, Some(&m.vocab)).unwrap();
        prop_assert_eq!(back.entries(), m.set.entries());
    }

    #[test]
    fn intervals_are_valid(c in counts(), delta in delta()) {
        let k = credal_interval(c, delta);
        prop_assert!(0.0 <= k.low() && k.low() <= k.high() && k.high() <= 1.0);
        let centre = c.added as f64 / c.eligible as f64;
        if c.added == 0 {
            prop_assert_eq!(k.low(), 0.0);
        } else {
            prop_assert!(k.contains(centre));
        }
    }

    #[test]
    fn width_laws(n in 1u64..2000, k in 1u64..20, delta in delta()) {
        let wide = hoeffding_half_width(n, delta);
        let narrow = hoeffding_half_width(n * k * k, delta);
        prop_assert!((wide / narrow - k as f64).abs() < 1e-9 * k as f64);
        let bound = |n: u64| credal_interval(EffectCounts { added: 0, eligible: n }, delta).high();
        let raw = (1.0 / delta).ln() / n as f64;
        if raw < 1.0 {
            prop_assert!((bound(n) / bound(n * k) - k as f64).abs() < 1e-9 * k as f64);
        }
    }

    #[test]
    fn point_and_interval_cohere(c in counts(), delta in delta()) {
        match point_estimate(c, delta, 5, 7) {
            PointEstimate::Exact(r) => {
                prop_assert!(c.added > 0);
                prop_assert_eq!(r, Rational::new(c.added.into(), c.eligible.into()));
                let hw = hoeffding_half_width(c.eligible, delta);
                let k = credal_interval(c, delta);
                let centre = c.added as f64 / c.eligible as f64;
                prop_assert!((k.low() - (centre - hw).max(0.0)).abs() < 1e-12);
                prop_assert!((k.high() - (centre + hw).min(1.0)).abs() < 1e-12);
            }
            PointEstimate::Unobserved(x) => {
                prop_assert_eq!(c.added, 0);
                prop_assert!((0.0..=1.0).contains(&x));
            }
            PointEstimate::Unconstrained => prop_assert!(false, "eligible > 0"),
        }
    }

    #[test]
    fn weights_equal_repetition(seed in any::<u64>(), point in any::<bool>()) {
        let m = micro(&mut rng(seed));
        let mode = if point { Mode::Point } else { Mode::Interval };
        let cfg = LearnerConfig::new(0.1, mode).unwrap();
        let d = m.domain();
        let weighted = learn(&m.set, &cfg, Some(&d)).unwrap();
        let repeated = learn(&m.set.expanded(), &cfg, Some(&d)).unwrap();
        prop_assert_eq!(weighted.actions, repeated.actions);
        prop_assert_eq!(weighted.total_weight, repeated.total_weight);
    }

    #[test]
    fn preconditions_hold_in_every_pre_state(seed in any::<u64>()) {
        let m = micro(&mut rng(seed));
        let model = learn(&m.set, &LearnerConfig::new(0.1, Mode::Interval).unwrap(), None).unwrap();
        for a in &model.actions {
            for t in m.set.triplets_for(&a.name) {
                prop_assert!(t.pre.satisfies(&a.preconditions).unwrap());
            }
        }
    }
}
