use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Ground constant. Integers order before symbols.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Sym(Arc<str>),
}

impl Value {
    pub fn sym(s: &str) -> Value {
        Value::Sym(Arc::from(s))
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Sym(s) => Some(s),
            Value::Int(_) => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            Value::Sym(_) => None,
        }
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::sym(s)
    }
}

impl From<&String> for Value {
    fn from(s: &String) -> Self {
        Value::sym(s)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<u64> for Value {
    fn from(i: u64) -> Self {
        Value::Int(i as i64)
    }
}

fn bare_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Sym(s) if bare_symbol(s) => f.write_str(s),
            Value::Sym(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(Value),
    Var(Arc<str>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Arc::from(name))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(v) => v.fmt(f),
            Term::Var(v) => f.write_str(v),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub pred: Arc<str>,
    pub terms: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, terms: Vec<Term>) -> Atom {
        Atom { pred: Arc::from(pred), terms }
    }

    pub fn vars(&self) -> impl Iterator<Item = &Arc<str>> {
        self.terms.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pred)?;
        if !self.terms.is_empty() {
            let t: Vec<String> = self.terms.iter().map(ToString::to_string).collect();
            write!(f, "({})", t.join(","))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Builtin {
    Lt,
    Le,
    Eq,
}

impl Builtin {
    pub fn from_name(name: &str) -> Option<Builtin> {
        match name {
            "lt" => Some(Builtin::Lt),
            "le" => Some(Builtin::Le),
            "eq" => Some(Builtin::Eq),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Lt => "lt",
            Builtin::Le => "le",
            Builtin::Eq => "eq",
        }
    }

    pub fn holds(self, a: &Value, b: &Value) -> bool {
        match self {
            Builtin::Lt => a < b,
            Builtin::Le => a <= b,
            Builtin::Eq => a == b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Literal {
    Atom { atom: Atom, negated: bool },
    Cmp { op: Builtin, lhs: Term, rhs: Term, negated: bool },
}

impl Literal {
    pub fn pos(atom: Atom) -> Literal {
        Literal::Atom { atom, negated: false }
    }

    pub fn neg(atom: Atom) -> Literal {
        Literal::Atom { atom, negated: true }
    }

    pub fn is_positive_atom(&self) -> bool {
        matches!(self, Literal::Atom { negated: false, .. })
    }

    pub fn vars(&self) -> Vec<&Arc<str>> {
        match self {
            Literal::Atom { atom, .. } => atom.vars().collect(),
            Literal::Cmp { lhs, rhs, .. } => [lhs, rhs]
                .into_iter()
                .filter_map(|t| match t {
                    Term::Var(v) => Some(v),
                    Term::Const(_) => None,
                })
                .collect(),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let neg = |n: bool| if n { "not " } else { "" };
        match self {
            Literal::Atom { atom, negated } => write!(f, "{}{atom}", neg(*negated)),
            Literal::Cmp { op, lhs, rhs, negated } => {
                write!(f, "{}{}({lhs},{rhs})", neg(*negated), op.name())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub head: Atom,
    pub body: Vec<Literal>,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            let b: Vec<String> = self.body.iter().map(ToString::to_string).collect();
            write!(f, " :- {}", b.join(", "))?;
        }
        f.write_str(".")
    }
}

/// A ground atom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fact {
    pub pred: Arc<str>,
    pub args: Vec<Value>,
}

impl Fact {
    pub fn new(pred: &str, args: Vec<Value>) -> Fact {
        Fact { pred: Arc::from(pred), args }
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pred)?;
        if !self.args.is_empty() {
            let a: Vec<String> = self.args.iter().map(ToString::to_string).collect();
            write!(f, "({})", a.join(","))?;
        }
        f.write_str(".")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatalogError {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("predicate {pred} used with arities {first} and {second}")]
    ArityMismatch { pred: String, first: usize, second: usize },
    #[error("rule `{rule}` is not range-restricted: variable {var} is unsafe")]
    Unsafe { rule: String, var: String },
    #[error("builtin {0} cannot be defined")]
    BuiltinHead(String),
    #[error("negative cycle through {{{}}}", .0.join(","))]
    Stratification(Vec<String>),
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
}

/// Rules plus extensional facts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub rules: Vec<Rule>,
    pub edb: BTreeSet<Fact>,
}

impl Program {
    pub fn new() -> Program {
        Program::default()
    }

    pub fn add_fact(&mut self, fact: Fact) {
        self.edb.insert(fact);
    }

    pub fn add_rule(&mut self, rule: Rule) {
        self.rules.push(rule);
    }

    /// Arity of every predicate mentioned anywhere, or the first conflict.
    pub fn arities(&self) -> Result<BTreeMap<Arc<str>, usize>, DatalogError> {
        let mut out: BTreeMap<Arc<str>, usize> = BTreeMap::new();
        let mut note = |pred: &Arc<str>, n: usize| match out.get(pred) {
            Some(&m) if m != n => Err(DatalogError::ArityMismatch {
                pred: pred.to_string(),
                first: m,
                second: n,
            }),
            _ => {
                out.insert(pred.clone(), n);
                Ok(())
            }
        };
        for f in &self.edb {
            note(&f.pred, f.args.len())?;
        }
        for r in &self.rules {
            note(&r.head.pred, r.head.terms.len())?;
            for l in &r.body {
                if let Literal::Atom { atom, .. } = l {
                    note(&atom.pred, atom.terms.len())?;
                }
            }
        }
        Ok(out)
    }

    /// Arity consistency, range restriction, and no builtin heads.
    pub fn check(&self) -> Result<(), DatalogError> {
        self.arities()?;
        for r in &self.rules {
            if Builtin::from_name(&r.head.pred).is_some() {
                return Err(DatalogError::BuiltinHead(r.head.pred.to_string()));
            }
            let bound: BTreeSet<&Arc<str>> = r
                .body
                .iter()
                .filter(|l| l.is_positive_atom())
                .flat_map(Literal::vars)
                .collect();
            let unsafe_var = r
                .head
                .vars()
                .chain(r.body.iter().filter(|l| !l.is_positive_atom()).flat_map(Literal::vars))
                .find(|v| !bound.contains(v));
            if let Some(v) = unsafe_var {
                return Err(DatalogError::Unsafe { rule: r.to_string(), var: v.to_string() });
            }
        }
        Ok(())
    }

    /// Predicates defined by at least one rule.
    pub fn idb_preds(&self) -> BTreeSet<Arc<str>> {
        self.rules.iter().map(|r| r.head.pred.clone()).collect()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for fact in &self.edb {
            writeln!(f, "{fact}")?;
        }
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}
