//! `.traj` files: one `(:trajectory <id> [:weight <n>] (:state ...) (:action <a>) ...)`
//! form per trajectory, states listing their true fluents.

use std::fmt::Write;
use std::sync::Arc;

use super::{Trajectory, TrajectorySet};
use crate::model::{Fluent, State, Vocabulary};
use crate::syntax::sexp::{read_all, Sexp, SourceSpan};
use crate::syntax::SyntaxError;

/// Fluent names in order of first appearance across `texts`.
pub fn infer_vocabulary(texts: &[&str]) -> Result<Vocabulary, SyntaxError> {
    let mut fluents: Vec<Fluent> = Vec::new();
    for text in texts {
        for form in read_all(text)? {
            let body = header(&form)?.2;
            for item in body {
                if item.head().as_deref() == Some(":state") {
                    for lit in &item.list().unwrap_or_default()[1..] {
                        let f = fluent_name(lit)?;
                        if !fluents.contains(&f) {
                            fluents.push(f);
                        }
                    }
                }
            }
        }
    }
    Vocabulary::new(fluents).map_err(|e| SyntaxError::semantic(SourceSpan::default(), e.to_string()))
}

/// Parses `.traj` text. Without a vocabulary, it is inferred from `text`.
pub fn parse_trajectories(text: &str, vocab: Option<&Arc<Vocabulary>>) -> Result<TrajectorySet, SyntaxError> {
    let vocab = match vocab {
        Some(v) => v.clone(),
        None => Arc::new(infer_vocabulary(&[text])?),
    };
    let mut set = TrajectorySet::new();
    for form in read_all(text)? {
        let (id, weight, body) = header(&form)?;
        let mut states = Vec::new();
        let mut actions = Vec::new();
        for (i, item) in body.iter().enumerate() {
            let want_state = i % 2 == 0;
            match (item.head().as_deref(), want_state) {
                (Some(":state"), true) => {
                    let mut trues = Vec::new();
                    for lit in &item.list().unwrap_or_default()[1..] {
                        let f = fluent_name(lit)?;
                        let known = vocab
                            .lookup(f.name())
                            .ok_or_else(|| SyntaxError::semantic(lit.span, format!("unknown fluent `{f}`")))?;
                        trues.push(known.clone());
                    }
                    states.push(
                        State::from_true(vocab.clone(), &trues)
                            .map_err(|e| SyntaxError::semantic(item.span, e.to_string()))?,
                    );
                }
                (Some(":action"), false) => {
                    let parts = item.list().unwrap_or_default();
                    let name = match parts {
                        [_, name] => name
                            .atom()
                            .filter(|a| !a.starts_with(':'))
                            .ok_or_else(|| SyntaxError::expected(name.span, &name.describe(), &["action name"]))?,
                        _ => return Err(SyntaxError::syntax(item.span, "`(:action <name>)` takes exactly one name")),
                    };
                    actions.push(name.to_lowercase());
                }
                (_, true) => return Err(SyntaxError::expected(item.span, &item.describe(), &["(:state ...)"])),
                (_, false) => return Err(SyntaxError::expected(item.span, &item.describe(), &["(:action <name>)"])),
            }
        }
        if states.len() != actions.len() + 1 {
            return Err(SyntaxError::syntax(form.span, format!("trajectory `{id}` must end with a state")));
        }
        let t = Trajectory::new(id, states, actions).map_err(|e| SyntaxError::semantic(form.span, e.to_string()))?;
        set.push(t, weight).map_err(|e| SyntaxError::semantic(form.span, e.to_string()))?;
    }
    Ok(set)
}

fn header(form: &Sexp) -> Result<(String, u64, &[Sexp]), SyntaxError> {
    let items =
        form.list().ok_or_else(|| SyntaxError::expected(form.span, &form.describe(), &["(:trajectory ...)"]))?;
    if form.head().as_deref() != Some(":trajectory") {
        return Err(SyntaxError::expected(form.span, &form.describe(), &["(:trajectory ...)"]));
    }
    let id = items
        .get(1)
        .and_then(|s| s.atom())
        .filter(|a| !a.starts_with(':'))
        .ok_or_else(|| SyntaxError::expected(form.span, "no identifier", &["trajectory id"]))?
        .to_string();
    let mut rest = &items[2..];
    let mut weight = 1;
    if rest.first().and_then(Sexp::atom).map(|a| a.eq_ignore_ascii_case(":weight")).unwrap_or(false) {
        let w = rest.get(1).ok_or_else(|| SyntaxError::syntax(rest[0].span, "`:weight` is missing its value"))?;
        weight = w
            .atom()
            .and_then(|a| a.parse::<u64>().ok())
            .filter(|&n| n >= 1)
            .ok_or_else(|| SyntaxError::expected(w.span, &w.describe(), &["positive integer weight"]))?;
        rest = &rest[2..];
    }
    Ok((id, weight, rest))
}

fn fluent_name(lit: &Sexp) -> Result<Fluent, SyntaxError> {
    match lit.list() {
        Some([name]) => match name.atom() {
            Some(a) if !a.eq_ignore_ascii_case("not") => {
                Fluent::new(a).map_err(|e| SyntaxError::semantic(name.span, e.to_string()))
            }
            _ => Err(SyntaxError::expected(lit.span, &lit.describe(), &["(<fluent>)"])),
        },
        _ => Err(SyntaxError::expected(lit.span, &lit.describe(), &["(<fluent>)"])),
    }
}

/// One line per trajectory, fluents in vocabulary order.
pub fn emit_trajectories(set: &TrajectorySet) -> String {
    let mut out = String::new();
    for (t, w) in set.entries() {
        write!(out, "(:trajectory {} :weight {}", t.id(), w).unwrap();
        for (i, s) in t.states().iter().enumerate() {
            out.push_str(" (:state");
            for f in s.true_fluents() {
                write!(out, " ({f})").unwrap();
            }
            out.push(')');
            if let Some(a) = t.actions().get(i) {
                write!(out, " (:action {a})").unwrap();
            }
        }
        out.push_str(")\n");
    }
    out
}
