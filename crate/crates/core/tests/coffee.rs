mod common;

use common::*;
use samplus_core::learner::EffectEstimate;
use samplus_core::model::Rational;
use samplus_core::trajectory::ViolationKind;
use samplus_core::{
    evaluate, fixtures, learn, parse_domain, render_learned, validate, LearnedModel, LearnerConfig, Mode, PointEstimate,
};

const LOWOU: &str = "leave-office-without-umbrella";
const MTOWOU: &str = "move-to-office-without-umbrella";

fn model(text: &str, mode: Mode) -> LearnedModel {
    learn(&table(text), &LearnerConfig::new(0.1, mode).unwrap(), Some(&coffee())).unwrap()
}

fn estimate<'a>(m: &'a LearnedModel, action: &str, l: &str) -> &'a EffectEstimate {
    m.action(action).unwrap().effect(&lit(l)).unwrap()
}

fn unobserved(e: &EffectEstimate) -> f64 {
    match e.point {
        PointEstimate::Unobserved(x) => x,
        ref p => panic!("expected an unobserved estimate, got {p:?}"),
    }
}

#[test]
fn coffee_fixture_has_seven_actions() {
    let d = coffee();
    let names: Vec<&str> = d.actions.iter().map(|a| a.name.as_str()).collect();
    assert_eq!(names.len(), 7);
    for (abbrev, full) in fixtures::ABBREVIATIONS {
        assert!(names.contains(&full), "{abbrev}");
    }
}

#[test]
fn malformed_domain_is_rejected() {
    let e = parse_domain(fixtures::COFFEE_DOMAIN_MALFORMED).unwrap_err();
    assert!(e.span.line > 1);
}

#[test]
fn skewed_lowou_unobserved_literals() {
    // The point estimate is ln(700)/2000; the smaller 0.0023 is the interval bound ln(10)/1000.
    let point = model(fixtures::TRACES_SKEWED, Mode::Point);
    let interval = model(fixtures::TRACES_SKEWED, Mode::Interval);
    for l in ["has-umbrella", "has-coffee", "user-has-coffee"] {
        assert!((unobserved(estimate(&point, LOWOU, l)) - 700f64.ln() / 2000.0).abs() < 1e-12);
        assert!((unobserved(estimate(&point, LOWOU, l)) - 0.003275).abs() < 1e-6);
        let bound = estimate(&interval, LOWOU, l).interval.high();
        assert!((bound - 10f64.ln() / 1000.0).abs() < 1e-12);
        assert!((bound - 0.002303).abs() < 1e-6);
    }
}

#[test]
fn alternative_t3_weight() {
    let m = model(fixtures::TRACES_SKEWED_19, Mode::Point);
    let iw = estimate(&m, LOWOU, "is-wet");
    assert_eq!(iw.counts.eligible, 1009);
    assert_eq!(iw.point, PointEstimate::Exact(Rational::new(895.into(), 1009.into())));
}

#[test]
fn corrected_t3_reproduces_the_reported_mtowou_values() {
    let m = model(fixtures::TRACES_T3_MTOWOU_SKEWED, Mode::Point);
    let iw = estimate(&m, MTOWOU, "is-wet");
    assert_eq!(iw.point, PointEstimate::Exact(Rational::new(95.into(), 105.into())));
    assert!((iw.point.value().unwrap() - 0.905).abs() < 5e-4);
    let hu = unobserved(estimate(&m, MTOWOU, "has-umbrella"));
    assert!((hu - 700f64.ln() / 210.0).abs() < 1e-12);
    assert!((hu - 0.031).abs() < 5e-4);
}

#[test]
fn table_validation() {
    let d = coffee();
    let report = validate(&table(fixtures::TRACES_T3_MTOWOU), &d).unwrap();
    assert!(report.is_ok());
    assert_eq!((report.trajectories, report.triplets), (4, 13));

    let report = validate(&table(fixtures::TRACES), &d).unwrap();
    assert_eq!(report.violations.len(), 1);
    let v = &report.violations[0];
    assert_eq!((v.trajectory.as_str(), v.step), ("t3", 3));
    assert_eq!(v.kind, ViolationKind::Precondition(vec![lit("has-umbrella")]));
}

#[test]
fn learned_models_parse_back() {
    for (text, mode) in [(fixtures::TRACES, Mode::Interval), (fixtures::TRACES_X100, Mode::Point)] {
        let m = model(text, mode);
        let rendered = render_learned(&m, 6);
        let d = parse_domain(&rendered).unwrap();
        assert_eq!(d.name, "simplified-coffee-learned");
        assert_eq!(d.actions.len(), 7);
        let report = evaluate(&d, &coffee()).unwrap();
        assert!(report.extra_actions.is_empty() && report.unlearned_actions.is_empty());
    }
}

#[test]
fn learned_point_model_text() {
    let text = render_learned(&model(fixtures::TRACES_X100, Mode::Point), 6);
    assert!(text.starts_with("; learned from 4 trajectories (total weight 400), delta=0.1, mode=point, |F|=5, |A|=7\n"));
    assert!(text.contains("(when (not (is-wet)) (probabilistic 0.333333 (is-wet)))"));
    assert!(text.contains("\n      (not (in-office))"));
}
