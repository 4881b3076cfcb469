//! Text formats: `.gqm` goal models and `.wfa` workflow nets with actors.
//!
//! Both are line-oriented: one statement per line, `#` comments, identifiers
//! matching `[A-Za-z_][A-Za-z0-9_]*`, and `key=value` attributes.

mod diag;
mod gqm;
mod lexer;
mod print;
mod wfa;

pub use diag::{Diagnostic, ParseResult, Parsed, Severity, SourceSpan};
pub use gqm::parse_goal_model;
pub use lexer::is_ident;
pub use print::{print_goal_model, print_wfa_net, GQM_HEADER, WFA_HEADER};
pub use wfa::parse_wfa_net;
