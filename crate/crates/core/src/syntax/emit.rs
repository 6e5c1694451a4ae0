use std::collections::BTreeSet;
use std::fmt::Write;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::Signed;

use crate::model::{round_rational, Domain, EffectFactor, Literal, Probability, Problem, Rational, Vocabulary};

/// Renders `p` with exactly `precision` decimal places, rounding half away from zero.
pub fn format_probability(p: &Rational, precision: u32) -> String {
    let rounded = round_rational(p, precision);
    let scale = BigInt::from(10u32).pow(precision);
    let scaled = (rounded * Rational::from_integer(scale.clone())).to_integer();
    let negative = scaled.sign() == Sign::Minus;
    let (int, frac) = scaled.abs().div_rem(&scale);
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    write!(out, "{int}").unwrap();
    if precision > 0 {
        write!(out, ".{:0>width$}", frac.to_string(), width = precision as usize).unwrap();
    }
    out
}

/// Deterministic pretty-printer. Literals follow predicate declaration order.
pub fn emit_domain(domain: &Domain, precision: u32) -> String {
    let precision = precision.max(1);
    let v = &domain.vocabulary;
    let mut out = String::new();
    writeln!(out, "(define (domain {})", domain.name).unwrap();
    if !domain.requirements.is_empty() {
        writeln!(out, "  (:requirements {})", domain.requirements.join(" ")).unwrap();
    }
    out.push_str("  (:predicates");
    for f in v.fluents() {
        write!(out, "\n    ({f})").unwrap();
    }
    out.push(')');
    for a in &domain.actions {
        write!(out, "\n\n  (:action {}", a.name).unwrap();
        write!(out, "\n    :precondition {}", conjunction(v, &a.precondition)).unwrap();
        out.push_str("\n    :effect ");
        match a.effect.as_slice() {
            [] => out.push_str("(and)"),
            [only] => out.push_str(&factor(v, only, precision)),
            many => {
                out.push_str("(and");
                for f in many {
                    write!(out, "\n      {}", factor(v, f, precision)).unwrap();
                }
                out.push(')');
            }
        }
        out.push(')');
    }
    out.push_str(")\n");
    out
}

/// Problem in the standard `(define (problem ...))` form.
pub fn emit_problem(problem: &Problem, domain: &Domain) -> String {
    let v = &domain.vocabulary;
    let mut out = String::new();
    writeln!(out, "(define (problem {})", problem.name).unwrap();
    writeln!(out, "  (:domain {})", problem.domain_name.as_deref().unwrap_or(&domain.name)).unwrap();
    out.push_str("  (:init");
    for f in problem.init.true_fluents() {
        write!(out, " ({f})").unwrap();
    }
    out.push_str(")\n");
    writeln!(out, "  (:goal {}))", conjunction(v, &problem.goal)).unwrap();
    out
}

fn conjunction(v: &Vocabulary, lits: &BTreeSet<Literal>) -> String {
    let sorted = v.sorted(lits);
    match sorted.as_slice() {
        [] => "(and)".to_string(),
        [only] => only.to_string(),
        many => {
            let parts: Vec<String> = many.iter().map(|l| l.to_string()).collect();
            format!("(and {})", parts.join(" "))
        }
    }
}

fn factor(v: &Vocabulary, f: &EffectFactor, precision: u32) -> String {
    let body = match &f.probability {
        Probability::Point(_) if f.probability.is_certain() => f.added.to_string(),
        Probability::Point(p) => format!("(probabilistic {} {})", format_probability(p, precision), f.added),
        Probability::Interval { low, high } => format!(
            "(probabilistic-interval {} {} {})",
            format_probability(low, precision),
            format_probability(high, precision),
            f.added
        ),
    };
    if f.condition.is_empty() {
        body
    } else {
        format!("(when {} {})", conjunction(v, &f.condition), body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::syntax::{parse_domain, parse_problem};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(format_probability(&r(1, 3), 4), "0.3333");
        assert_eq!(format_probability(&r(2, 3), 4), "0.6667");
        assert_eq!(format_probability(&r(1, 1), 6), "1.000000");
        assert_eq!(format_probability(&r(9, 10), 1), "0.9");
        assert_eq!(format_probability(&r(0, 1), 3), "0.000");
        assert_eq!(format_probability(&r(1, 20), 1), "0.1");
    }

    #[test]
    fn coffee_round_trip() {
        let d = parse_domain(fixtures::COFFEE_DOMAIN).unwrap();
        let text = emit_domain(&d, 6);
        assert!(text.contains("(probabilistic 0.900000 (is-wet))"));
        assert_eq!(parse_domain(&text).unwrap(), d);
        assert_eq!(emit_domain(&parse_domain(&text).unwrap(), 6), text);
    }

    #[test]
    fn problem_round_trip() {
        let d = parse_domain(fixtures::COFFEE_DOMAIN).unwrap();
        let p = parse_problem(fixtures::COFFEE_PROBLEM, &d).unwrap();
        let text = emit_problem(&p, &d);
        let q = parse_problem(&text, &d).unwrap();
        assert_eq!(q.init, p.init);
        assert_eq!(q.goal, p.goal);
    }

    #[test]
    fn guarded_interval_factor() {
        let d = parse_domain(fixtures::COFFEE_DOMAIN).unwrap();
        let iw = d.vocabulary.lookup("is-wet").unwrap().clone();
        let f = EffectFactor {
            condition: [Literal::neg(iw.clone())].into(),
            probability: Probability::Interval { low: r(0, 1), high: r(8, 1000) },
            added: Literal::pos(iw),
        };
        assert_eq!(
            factor(&d.vocabulary, &f, 6),
            "(when (not (is-wet)) (probabilistic-interval 0.000000 0.008000 (is-wet)))"
        );
    }
}
