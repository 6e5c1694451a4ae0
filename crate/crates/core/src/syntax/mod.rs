//! Reader and writer for the propositional PPDDL subset, extended with
//! `(probabilistic-interval <lo> <hi> <effect>)` for imprecise effects.

mod emit;
mod parse;
pub mod sexp;

pub use emit::{emit_domain, emit_problem, format_probability};
pub use parse::{parse_domain, parse_problem};
pub use sexp::{ErrorKind, SourceSpan, SyntaxError};
