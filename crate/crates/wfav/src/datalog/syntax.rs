//! Text syntax: `head(X) :- a(X,Y), not b(Y), lt(X,Y).`
//!
//! Variables start with an uppercase letter or `_`; a lone `_` is anonymous.
//! Constants are lowercase identifiers, quoted strings or integers. `%`
//! starts a comment.

use std::iter::Peekable;
use std::str::CharIndices;
use std::sync::Arc;

use super::ast::*;

struct Cursor<'a> {
    text: &'a str,
    chars: Peekable<CharIndices<'a>>,
    line: usize,
    col: usize,
    fresh: usize,
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

impl<'a> Cursor<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, DatalogError> {
        Err(DatalogError::Syntax { line: self.line, column: self.col, message: message.into() })
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some(&(_, c)) = self.chars.peek() {
            if c == '%' {
                while !matches!(self.chars.peek(), None | Some((_, '\n'))) {
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.peek().map(|&(_, c)| c)
    }

    fn expect(&mut self, s: &str) -> Result<(), DatalogError> {
        self.skip_ws();
        for want in s.chars() {
            match self.chars.peek() {
                Some(&(_, c)) if c == want => {
                    self.bump();
                }
                _ => return self.err(format!("expected '{s}'")),
            }
        }
        Ok(())
    }

    fn word(&mut self) -> Result<&'a str, DatalogError> {
        self.skip_ws();
        let start = match self.chars.peek() {
            Some(&(i, c)) if c.is_ascii_alphabetic() || c == '_' => i,
            _ => return self.err("expected identifier"),
        };
        let mut end = start;
        while let Some(&(i, c)) = self.chars.peek() {
            if !ident_char(c) {
                break;
            }
            end = i + c.len_utf8();
            self.bump();
        }
        Ok(&self.text[start..end])
    }

    fn term(&mut self) -> Result<Term, DatalogError> {
        match self.peek() {
            Some('"') => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None | Some('\n') => return self.err("unterminated string"),
                        Some('"') => break,
                        Some('\\') => match self.bump() {
                            Some(c @ ('"' | '\\')) => s.push(c),
                            Some('n') => s.push('\n'),
                            _ => return self.err("bad escape"),
                        },
                        Some(c) => s.push(c),
                    }
                }
                Ok(Term::Const(Value::sym(&s)))
            }
            Some(c) if c.is_ascii_digit() || c == '-' => {
                let mut s = String::new();
                if c == '-' {
                    s.push(c);
                    self.bump();
                }
                while let Some(&(_, d)) = self.chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    s.push(d);
                    self.bump();
                }
                match s.parse() {
                    Ok(i) => Ok(Term::Const(Value::Int(i))),
                    Err(_) => self.err(format!("bad integer '{s}'")),
                }
            }
            _ => {
                let w = self.word()?;
                if w == "_" {
                    self.fresh += 1;
                    Ok(Term::Var(Arc::from(format!("_{}", self.fresh))))
                } else if w.starts_with(|c: char| c.is_ascii_uppercase() || c == '_') {
                    Ok(Term::var(w))
                } else {
                    Ok(Term::Const(Value::sym(w)))
                }
            }
        }
    }

    fn atom(&mut self) -> Result<Atom, DatalogError> {
        let pred = self.word()?;
        if pred.starts_with(|c: char| c.is_ascii_uppercase() || c == '_') {
            return self.err(format!("predicate '{pred}' must start lowercase"));
        }
        let mut terms = Vec::new();
        if self.peek() == Some('(') {
            self.bump();
            loop {
                terms.push(self.term()?);
                match self.peek() {
                    Some(',') => {
                        self.bump();
                    }
                    Some(')') => {
                        self.bump();
                        break;
                    }
                    _ => return self.err("expected ',' or ')'"),
                }
            }
        }
        Ok(Atom::new(pred, terms))
    }

    fn literal(&mut self) -> Result<Literal, DatalogError> {
        let mut atom = self.atom()?;
        let mut negated = false;
        if &*atom.pred == "not" && atom.terms.is_empty() {
            negated = true;
            atom = self.atom()?;
        }
        if let Some(op) = Builtin::from_name(&atom.pred) {
            let [lhs, rhs]: [Term; 2] = match atom.terms.try_into() {
                Ok(t) => t,
                Err(_) => return self.err(format!("builtin {} takes 2 arguments", op.name())),
            };
            return Ok(Literal::Cmp { op, lhs, rhs, negated });
        }
        Ok(Literal::Atom { atom, negated })
    }
}

/// Parses clauses into `into`. Ground bodyless clauses become EDB facts.
pub fn parse_into(text: &str, into: &mut Program) -> Result<(), DatalogError> {
    let mut c = Cursor { text, chars: text.char_indices().peekable(), line: 1, col: 1, fresh: 0 };
    while c.peek().is_some() {
        let head = c.atom()?;
        let mut body = Vec::new();
        if c.peek() == Some(':') {
            c.expect(":-")?;
            loop {
                body.push(c.literal()?);
                if c.peek() == Some(',') {
                    c.bump();
                } else {
                    break;
                }
            }
        }
        c.expect(".")?;
        let ground: Option<Vec<Value>> = head
            .terms
            .iter()
            .map(|t| match t {
                Term::Const(v) => Some(v.clone()),
                Term::Var(_) => None,
            })
            .collect();
        match ground {
            Some(args) if body.is_empty() => into.add_fact(Fact { pred: head.pred, args }),
            _ => into.add_rule(Rule { head, body }),
        }
    }
    into.check()
}

pub fn parse_program(text: &str) -> Result<Program, DatalogError> {
    let mut p = Program::new();
    parse_into(text, &mut p)?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rules_and_facts() {
        let p = parse_program("% chain\ne(a,b). e(b,\"C d\").\ntc(X,Y) :- e(X,Y).\ntc(X,Z) :- tc(X,Y), e(Y,Z), not bad(Z), lt(1,2).").unwrap();
        assert_eq!(p.edb.len(), 2);
        assert_eq!(p.rules.len(), 2);
        assert_eq!(
            p.rules[1].to_string(),
            "tc(X,Z) :- tc(X,Y), e(Y,Z), not bad(Z), lt(1,2)."
        );
    }

    #[test]
    fn display_reparses() {
        let src = "p(X) :- q(X,_), not r(X), not eq(X,\"Big\").\nq(a,-3).";
        let p = parse_program(src).unwrap();
        let again = parse_program(&p.to_string()).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn rejects_unsafe_and_syntax() {
        assert!(matches!(parse_program("p(X) :- not q(X)."), Err(DatalogError::Unsafe { .. })));
        assert!(matches!(parse_program("p(X)."), Err(DatalogError::Unsafe { .. })));
        let e = parse_program("p(a) :- q(a)\n").unwrap_err();
        assert!(matches!(e, DatalogError::Syntax { line: 2, .. }), "{e:?}");
        assert!(matches!(parse_program("p(a). p(a,b)."), Err(DatalogError::ArityMismatch { .. })));
    }
}
