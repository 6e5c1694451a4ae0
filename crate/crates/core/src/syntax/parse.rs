use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::sexp::{read_one, Sexp, SourceSpan, SyntaxError};
use crate::model::{
    ActionSchema, Domain, EffectFactor, Fluent, Literal, Probability, Problem, Rational, State, Vocabulary,
};

/// Parses a propositional PPDDL domain, including `probabilistic-interval` factors.
pub fn parse_domain(text: &str) -> Result<Domain, SyntaxError> {
    let top = read_one(text)?;
    let items = expect_list(&top, "`(define ...)`")?;
    expect_keyword(items.first(), top.span, "define")?;
    let header = items.get(1).ok_or_else(|| SyntaxError::expected(top.span, "end of form", &["(domain <name>)"]))?;
    let header_items = expect_list(header, "`(domain <name>)`")?;
    expect_keyword(header_items.first(), header.span, "domain")?;
    let name = ident(header_items.get(1), header.span, "domain name")?;
    no_extra(header_items, 2)?;

    let mut requirements = Vec::new();
    let mut vocab: Option<Arc<Vocabulary>> = None;
    let mut actions: Vec<ActionSchema> = Vec::new();
    let mut action_spans: Vec<SourceSpan> = Vec::new();

    for section in &items[2..] {
        let parts = expect_list(section, "a domain section")?;
        let key = parts.first().and_then(Sexp::atom).map(str::to_lowercase);
        match key.as_deref() {
            Some(":requirements") => {
                for r in &parts[1..] {
                    let flag = r
                        .atom()
                        .filter(|a| a.starts_with(':'))
                        .ok_or_else(|| SyntaxError::expected(r.span, &r.describe(), &["requirement flag"]))?;
                    requirements.push(flag.to_lowercase());
                }
            }
            Some(":predicates") => {
                if vocab.is_some() {
                    return Err(SyntaxError::semantic(section.span, "duplicate `:predicates` section"));
                }
                vocab = Some(Arc::new(predicates(&parts[1..])?));
            }
            Some(":action") => {
                let v = vocab.clone().unwrap_or_default();
                let (action, name_span) = action(section, parts, &v)?;
                if let Some(i) = actions.iter().position(|a| a.name == action.name) {
                    return Err(SyntaxError::semantic(
                        name_span,
                        format!("duplicate action `{}` (first defined at {})", action.name, action_spans[i]),
                    ));
                }
                actions.push(action);
                action_spans.push(name_span);
            }
            _ => {
                let found = parts.first().map(Sexp::describe).unwrap_or_else(|| "`()`".into());
                return Err(SyntaxError::expected(section.span, &found, &[":requirements", ":predicates", ":action"]));
            }
        }
    }

    let vocabulary = vocab.unwrap_or_default();
    Domain::new(name, requirements, vocabulary, actions).map_err(|e| SyntaxError::semantic(top.span, e.to_string()))
}

/// Parses a problem against `domain`. `:init` is completed under the closed world.
///
/// Both the standard `(define (problem N) (:domain D) ...)` header and the
/// short `(:define N ...)` header are accepted.
pub fn parse_problem(text: &str, domain: &Domain) -> Result<Problem, SyntaxError> {
    let top = read_one(text)?;
    let items = expect_list(&top, "`(define ...)`")?;
    let head = items.first().and_then(Sexp::atom).map(str::to_lowercase);
    let (name, body) = match head.as_deref() {
        Some("define") => {
            let header =
                items.get(1).ok_or_else(|| SyntaxError::expected(top.span, "end of form", &["(problem <name>)"]))?;
            let hi = expect_list(header, "`(problem <name>)`")?;
            expect_keyword(hi.first(), header.span, "problem")?;
            let name = ident(hi.get(1), header.span, "problem name")?;
            no_extra(hi, 2)?;
            (name, &items[2..])
        }
        Some(":define") => (ident(items.get(1), top.span, "problem name")?, &items[2..]),
        _ => {
            let found = items.first().map(Sexp::describe).unwrap_or_else(|| "`()`".into());
            return Err(SyntaxError::expected(top.span, &found, &["define", ":define"]));
        }
    };

    let vocab = &domain.vocabulary;
    let mut domain_name = None;
    let mut init = None;
    let mut goal = None;
    for section in body {
        let parts = expect_list(section, "a problem section")?;
        let key = parts.first().and_then(Sexp::atom).map(str::to_lowercase);
        match key.as_deref() {
            Some(":domain") => {
                let d = ident(parts.get(1), section.span, "domain name")?;
                no_extra(parts, 2)?;
                if d != domain.name {
                    return Err(SyntaxError::semantic(
                        parts[1].span,
                        format!("problem is for domain `{d}`, not `{}`", domain.name),
                    ));
                }
                domain_name = Some(d);
            }
            Some(":requirements") => {}
            Some(":init") => {
                if init.is_some() {
                    return Err(SyntaxError::semantic(section.span, "duplicate `:init` section"));
                }
                let mut lits = Vec::new();
                for item in &parts[1..] {
                    goal_description(item, vocab, &mut lits)?;
                }
                let set = consistent(&lits)?;
                let trues: Vec<&Fluent> = set.iter().filter(|l| l.positive).map(|l| &l.fluent).collect();
                let state = State::from_true(vocab.clone(), trues)
                    .map_err(|e| SyntaxError::semantic(section.span, e.to_string()))?;
                init = Some(state);
            }
            Some(":goal") => {
                if goal.is_some() {
                    return Err(SyntaxError::semantic(section.span, "duplicate `:goal` section"));
                }
                let mut lits = Vec::new();
                for item in &parts[1..] {
                    goal_description(item, vocab, &mut lits)?;
                }
                goal = Some(consistent(&lits)?);
            }
            _ => {
                let found = parts.first().map(Sexp::describe).unwrap_or_else(|| "`()`".into());
                return Err(SyntaxError::expected(section.span, &found, &[":domain", ":init", ":goal"]));
            }
        }
    }
    Ok(Problem {
        name,
        domain_name,
        init: init.unwrap_or_else(|| State::all_false(vocab.clone())),
        goal: goal.unwrap_or_default(),
    })
}

fn predicates(items: &[Sexp]) -> Result<Vocabulary, SyntaxError> {
    let mut fluents: Vec<Fluent> = Vec::new();
    for p in items {
        let parts = expect_list(p, "`(<predicate>)`")?;
        let name = ident(parts.first(), p.span, "predicate name")?;
        if parts.len() > 1 {
            return Err(SyntaxError::semantic(
                parts[1].span,
                format!("predicate `{name}` has parameters; only propositional predicates are supported"),
            ));
        }
        let fluent = Fluent::new(&name).map_err(|e| SyntaxError::semantic(p.span, e.to_string()))?;
        if fluents.contains(&fluent) {
            return Err(SyntaxError::semantic(p.span, format!("duplicate predicate `{name}`")));
        }
        fluents.push(fluent);
    }
    Vocabulary::new(fluents).map_err(|e| SyntaxError::semantic(SourceSpan::default(), e.to_string()))
}

fn action(section: &Sexp, parts: &[Sexp], vocab: &Vocabulary) -> Result<(ActionSchema, SourceSpan), SyntaxError> {
    let name_span = parts.get(1).map(|s| s.span).unwrap_or(section.span);
    let name = ident(parts.get(1), section.span, "action name")?;
    let mut precondition = None;
    let mut effect = None;
    let mut seen_params = false;
    let mut rest = parts[2..].iter();
    while let Some(key) = rest.next() {
        let k = key
            .atom()
            .map(str::to_lowercase)
            .ok_or_else(|| SyntaxError::expected(key.span, &key.describe(), &[":precondition", ":effect"]))?;
        let value = rest.next().ok_or_else(|| SyntaxError::syntax(key.span, format!("`{k}` is missing its value")))?;
        match k.as_str() {
            ":parameters" if !seen_params => {
                seen_params = true;
                if value.list().map(|l| !l.is_empty()).unwrap_or(true) {
                    return Err(SyntaxError::semantic(
                        value.span,
                        format!("action `{name}` has parameters; only propositional actions are supported"),
                    ));
                }
            }
            ":precondition" if precondition.is_none() => {
                let mut lits = Vec::new();
                goal_description(value, vocab, &mut lits)?;
                precondition = Some(consistent(&lits)?);
            }
            ":effect" if effect.is_none() => {
                let mut factors = Vec::new();
                effect_tree(value, vocab, &BTreeSet::new(), false, &mut factors)?;
                effect = Some(factors);
            }
            ":parameters" | ":precondition" | ":effect" => {
                return Err(SyntaxError::semantic(key.span, format!("duplicate `{k}` in action `{name}`")));
            }
            _ => {
                return Err(SyntaxError::expected(
                    key.span,
                    &key.describe(),
                    &[":parameters", ":precondition", ":effect"],
                ))
            }
        }
    }
    Ok((
        ActionSchema { name, precondition: precondition.unwrap_or_default(), effect: effect.unwrap_or_default() },
        name_span,
    ))
}

/// Conjunction of literals; nested `and`s are flattened.
fn goal_description(gd: &Sexp, vocab: &Vocabulary, out: &mut Vec<(Literal, SourceSpan)>) -> Result<(), SyntaxError> {
    if gd.head().as_deref() == Some("and") {
        for item in &gd.list().unwrap_or_default()[1..] {
            goal_description(item, vocab, out)?;
        }
        return Ok(());
    }
    out.push((literal(gd, vocab)?, gd.span));
    Ok(())
}

fn consistent(lits: &[(Literal, SourceSpan)]) -> Result<BTreeSet<Literal>, SyntaxError> {
    let mut set = BTreeSet::new();
    for (l, span) in lits {
        if set.contains(&l.negate()) {
            return Err(SyntaxError::semantic(
                *span,
                format!("conjunction requires both `{}` and its negation", l.fluent),
            ));
        }
        set.insert(l.clone());
    }
    Ok(set)
}

fn literal(form: &Sexp, vocab: &Vocabulary) -> Result<Literal, SyntaxError> {
    let items = expect_list(form, "a literal")?;
    if form.head().as_deref() == Some("not") {
        if items.len() != 2 {
            return Err(SyntaxError::syntax(form.span, "`not` takes exactly one atomic formula"));
        }
        return atomic(&items[1], vocab).map(|l| l.negate());
    }
    atomic(form, vocab)
}

fn atomic(form: &Sexp, vocab: &Vocabulary) -> Result<Literal, SyntaxError> {
    let items = expect_list(form, "`(<predicate>)`")?;
    let head = items.first().ok_or_else(|| SyntaxError::expected(form.span, "`()`", &["predicate name"]))?;
    let name = head.atom().ok_or_else(|| SyntaxError::expected(head.span, &head.describe(), &["predicate name"]))?;
    let lower = name.to_lowercase();
    if matches!(lower.as_str(), "and" | "not" | "when" | "probabilistic" | "probabilistic-interval") {
        return Err(SyntaxError::syntax(
            head.span,
            format!("`{lower}` is not allowed here; expected an atomic formula"),
        ));
    }
    if items.len() > 1 {
        return Err(SyntaxError::semantic(items[1].span, format!("`{lower}` takes no arguments")));
    }
    let fluent = vocab
        .lookup(name)
        .ok_or_else(|| SyntaxError::semantic(head.span, format!("undeclared predicate `{lower}`")))?;
    Ok(Literal::pos(fluent.clone()))
}

fn effect_tree(
    e: &Sexp,
    vocab: &Vocabulary,
    condition: &BTreeSet<Literal>,
    in_when: bool,
    out: &mut Vec<EffectFactor>,
) -> Result<(), SyntaxError> {
    let items = expect_list(e, "an effect")?;
    match e.head().as_deref() {
        Some("and") => {
            for item in &items[1..] {
                effect_tree(item, vocab, condition, in_when, out)?;
            }
        }
        Some("when") => {
            if in_when {
                return Err(SyntaxError::semantic(e.span, "nested `when` is not supported"));
            }
            if items.len() != 3 {
                return Err(SyntaxError::syntax(e.span, "`when` takes a condition and an effect"));
            }
            let mut lits = Vec::new();
            goal_description(&items[1], vocab, &mut lits)?;
            let mut cond = condition.clone();
            cond.extend(consistent(&lits)?);
            effect_tree(&items[2], vocab, &cond, true, out)?;
        }
        Some("probabilistic") => {
            if items.len() > 3 {
                return Err(SyntaxError::semantic(
                    items[3].span,
                    "multi-outcome `probabilistic` effects are not supported; use one outcome per form",
                ));
            }
            if items.len() != 3 {
                return Err(SyntaxError::syntax(e.span, "`probabilistic` takes a probability and an effect"));
            }
            let p = probability(&items[1])?;
            let probability = Probability::Point(p);
            for lit in literal_conjunction(&items[2], vocab)? {
                out.push(EffectFactor { condition: condition.clone(), probability: probability.clone(), added: lit });
            }
        }
        Some("probabilistic-interval") => {
            if items.len() != 4 {
                return Err(SyntaxError::syntax(
                    e.span,
                    "`probabilistic-interval` takes a lower bound, an upper bound and an effect",
                ));
            }
            let low = probability(&items[1])?;
            let high = probability(&items[2])?;
            if low > high {
                return Err(SyntaxError::semantic(
                    items[1].span.to(items[2].span),
                    "interval lower bound exceeds upper bound",
                ));
            }
            let probability = Probability::Interval { low, high };
            for lit in literal_conjunction(&items[3], vocab)? {
                out.push(EffectFactor { condition: condition.clone(), probability: probability.clone(), added: lit });
            }
        }
        _ => out.push(EffectFactor {
            condition: condition.clone(),
            probability: Probability::certain(),
            added: literal(e, vocab)?,
        }),
    }
    Ok(())
}

fn literal_conjunction(e: &Sexp, vocab: &Vocabulary) -> Result<Vec<Literal>, SyntaxError> {
    let mut out = Vec::new();
    collect_literals(e, vocab, &mut out)?;
    Ok(out)
}

fn collect_literals(e: &Sexp, vocab: &Vocabulary, out: &mut Vec<Literal>) -> Result<(), SyntaxError> {
    if e.head().as_deref() == Some("and") {
        for item in &e.list().unwrap_or_default()[1..] {
            collect_literals(item, vocab, out)?;
        }
        return Ok(());
    }
    match e.head().as_deref() {
        Some("when" | "probabilistic" | "probabilistic-interval") => {
            Err(SyntaxError::semantic(e.span, "a probabilistic outcome must be a literal or a conjunction of literals"))
        }
        _ => {
            out.push(literal(e, vocab)?);
            Ok(())
        }
    }
}

/// Decimal (`0.9`, `.5`, `1`) or rational (`1/3`) probability, in [0,1].
fn probability(form: &Sexp) -> Result<Rational, SyntaxError> {
    let text = form.atom().ok_or_else(|| SyntaxError::expected(form.span, &form.describe(), &["probability"]))?;
    let value = parse_number(text)
        .ok_or_else(|| SyntaxError::expected(form.span, &format!("`{text}`"), &["decimal or rational probability"]))?;
    if value < Rational::zero() || value > Rational::one() {
        return Err(SyntaxError::semantic(form.span, format!("probability `{text}` is outside [0,1]")));
    }
    Ok(value)
}

pub(crate) fn parse_number(text: &str) -> Option<Rational> {
    fn digits(s: &str) -> bool {
        !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
    }
    if let Some((n, d)) = text.split_once('/') {
        if !digits(n) || !digits(d) {
            return None;
        }
        let d: BigInt = d.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n.parse().ok()?, d));
    }
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if (int.is_empty() && frac.is_empty()) || !(int.is_empty() || digits(int)) || !(frac.is_empty() || digits(frac)) {
        return None;
    }
    let mantissa: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = BigInt::from(10u32).pow(frac.len() as u32);
    Some(Rational::new(mantissa, scale))
}

fn expect_list<'a>(form: &'a Sexp, what: &str) -> Result<&'a [Sexp], SyntaxError> {
    form.list().ok_or_else(|| SyntaxError::expected(form.span, &form.describe(), &[what]))
}

fn expect_keyword(form: Option<&Sexp>, outer: SourceSpan, keyword: &str) -> Result<(), SyntaxError> {
    match form {
        Some(f) if f.atom().map(|a| a.eq_ignore_ascii_case(keyword)).unwrap_or(false) => Ok(()),
        Some(f) => Err(SyntaxError::expected(f.span, &f.describe(), &[keyword])),
        None => Err(SyntaxError::expected(outer, "end of form", &[keyword])),
    }
}

fn ident(form: Option<&Sexp>, outer: SourceSpan, what: &str) -> Result<String, SyntaxError> {
    match form {
        Some(f) => match f.atom() {
            Some(a) if !a.starts_with(':') && parse_number(a).is_none() => Ok(a.to_lowercase()),
            _ => Err(SyntaxError::expected(f.span, &f.describe(), &[what])),
        },
        None => Err(SyntaxError::expected(outer, "end of form", &[what])),
    }
}

fn no_extra(items: &[Sexp], n: usize) -> Result<(), SyntaxError> {
    match items.get(n) {
        Some(extra) => Err(SyntaxError::syntax(extra.span, format!("unexpected {}", extra.describe()))),
        None => Ok(()),
    }
}
