//! Stratified Datalog with negation and the comparison builtins `lt`, `le`, `eq`.

mod ast;
mod eval;
mod stratify;
mod syntax;

pub use ast::{Atom, Builtin, DatalogError, Fact, Literal, Program, Rule, Term, Value};
pub use eval::{evaluate, Database, Substitution, Tuple};
pub use stratify::{dependency_edges, stratify, Stratum};
pub use syntax::{parse_into, parse_program};

/// Sorted `pred(c1,c2).` lines, one per fact.
pub fn emit_facts<'a>(facts: impl IntoIterator<Item = &'a Fact>) -> String {
    let mut lines: Vec<String> = facts.into_iter().map(ToString::to_string).collect();
    lines.sort();
    lines.dedup();
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}
