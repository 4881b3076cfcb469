//! Line-oriented tokenizer shared by the `.gqm` and `.wfa` formats.
//!
//! A statement is `keyword positional* (key=value | flag)*` on a single line.
//! Values are words, unsigned integers, quoted strings, or `{a, b@c}` sets.

use super::diag::{Diagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Int(u64),
    Str(String),
    Eq,
    LBrace,
    RBrace,
    Comma,
    At,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetItem {
    pub name: String,
    /// Set for `name@target` items.
    pub target: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Word(String),
    Int(u64),
    Str(String),
    Set(Vec<SetItem>),
}

impl Value {
    pub fn describe(&self) -> &'static str {
        match self {
            Value::Word(_) => "word",
            Value::Int(_) => "integer",
            Value::Str(_) => "string",
            Value::Set(_) => "set",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spanned<T> {
    pub value: T,
    pub column: usize,
}

#[derive(Debug, Clone)]
pub struct Statement {
    pub line: usize,
    pub keyword: Spanned<String>,
    pub positionals: Vec<Spanned<Value>>,
    pub attrs: Vec<(Spanned<String>, Spanned<Value>)>,
    pub flags: Vec<Spanned<String>>,
}

pub fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub struct Lexer<'a> {
    file: &'a str,
}

impl<'a> Lexer<'a> {
    pub fn new(file: &'a str) -> Self {
        Lexer { file }
    }

    pub fn span(&self, line: usize, column: usize) -> SourceSpan {
        SourceSpan {
            file: self.file.to_string(),
            line,
            column,
        }
    }

    /// Splits `text` into statements; lines that fail to tokenize produce
    /// diagnostics and are skipped.
    pub fn statements(&self, text: &str) -> (Vec<Statement>, Vec<Diagnostic>) {
        let mut stmts = Vec::new();
        let mut diags = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            match self.tokenize(line, lineno) {
                Ok(toks) if toks.is_empty() => {}
                Ok(toks) => match self.group(toks, lineno) {
                    Ok(s) => stmts.push(s),
                    Err(d) => diags.push(d),
                },
                Err(d) => diags.push(d),
            }
        }
        (stmts, diags)
    }

    fn tokenize(&self, line: &str, lineno: usize) -> Result<Vec<Spanned<Tok>>, Diagnostic> {
        let chars: Vec<char> = line.chars().collect();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            match c {
                '#' => break,
                c if c.is_whitespace() => i += 1,
                '=' | '{' | '}' | ',' | '@' => {
                    let t = match c {
                        '=' => Tok::Eq,
                        '{' => Tok::LBrace,
                        '}' => Tok::RBrace,
                        ',' => Tok::Comma,
                        _ => Tok::At,
                    };
                    toks.push(Spanned { value: t, column });
                    i += 1;
                }
                '"' => {
                    let mut s = String::new();
                    i += 1;
                    loop {
                        match chars.get(i) {
                            None => {
                                return Err(Diagnostic::error(
                                    self.span(lineno, column),
                                    "unterminated string",
                                ))
                            }
                            Some('"') => {
                                i += 1;
                                break;
                            }
                            Some('\\') => {
                                match chars.get(i + 1) {
                                    Some('"') => s.push('"'),
                                    Some('\\') => s.push('\\'),
                                    Some('n') => s.push('\n'),
                                    _ => {
                                        return Err(Diagnostic::error(
                                            self.span(lineno, i + 1),
                                            "invalid escape in string",
                                        ))
                                    }
                                }
                                i += 2;
                            }
                            Some(ch) => {
                                s.push(*ch);
                                i += 1;
                            }
                        }
                    }
                    toks.push(Spanned { value: Tok::Str(s), column });
                }
                c if c.is_ascii_digit() => {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    if i < chars.len() && (chars[i].is_ascii_alphabetic() || chars[i] == '_') {
                        return Err(Diagnostic::error(
                            self.span(lineno, column),
                            "identifiers must not start with a digit",
                        ));
                    }
                    let text: String = chars[start..i].iter().collect();
                    let n = text.parse::<u64>().map_err(|_| {
                        Diagnostic::error(self.span(lineno, column), "integer out of range")
                    })?;
                    toks.push(Spanned { value: Tok::Int(n), column });
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len()
                        && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '-')
                    {
                        i += 1;
                    }
                    let text: String = chars[start..i].iter().collect();
                    toks.push(Spanned { value: Tok::Word(text), column });
                }
                other => {
                    return Err(Diagnostic::error(
                        self.span(lineno, column),
                        format!("unexpected character '{other}'"),
                    ))
                }
            }
        }
        Ok(toks)
    }

    fn group(&self, toks: Vec<Spanned<Tok>>, line: usize) -> Result<Statement, Diagnostic> {
        let mut it = toks.into_iter().peekable();
        let first = it.next().unwrap();
        let keyword = match first.value {
            Tok::Word(w) => Spanned { value: w, column: first.column },
            _ => {
                return Err(Diagnostic::error(
                    self.span(line, first.column),
                    "expected a statement keyword",
                ))
            }
        };
        let mut stmt = Statement {
            line,
            keyword,
            positionals: Vec::new(),
            attrs: Vec::new(),
            flags: Vec::new(),
        };
        while let Some(tok) = it.next() {
            let column = tok.column;
            match tok.value {
                Tok::Word(w) => {
                    if matches!(it.peek(), Some(Spanned { value: Tok::Eq, .. })) {
                        it.next();
                        let v = self.value(&mut it, line, column)?;
                        stmt.attrs.push((Spanned { value: w, column }, v));
                    } else if w.contains('-') {
                        stmt.flags.push(Spanned { value: w, column });
                    } else if stmt.attrs.is_empty() && stmt.flags.is_empty() {
                        stmt.positionals.push(Spanned { value: Value::Word(w), column });
                    } else {
                        stmt.flags.push(Spanned { value: w, column });
                    }
                }
                Tok::Str(s) if stmt.attrs.is_empty() && stmt.flags.is_empty() => {
                    stmt.positionals.push(Spanned { value: Value::Str(s), column });
                }
                Tok::Int(n) if stmt.attrs.is_empty() && stmt.flags.is_empty() => {
                    stmt.positionals.push(Spanned { value: Value::Int(n), column });
                }
                _ => {
                    return Err(Diagnostic::error(
                        self.span(line, column),
                        "malformed attribute",
                    ))
                }
            }
        }
        Ok(stmt)
    }

    fn value(
        &self,
        it: &mut std::iter::Peekable<std::vec::IntoIter<Spanned<Tok>>>,
        line: usize,
        key_col: usize,
    ) -> Result<Spanned<Value>, Diagnostic> {
        let Some(tok) = it.next() else {
            return Err(Diagnostic::error(
                self.span(line, key_col),
                "malformed attribute: missing value",
            ));
        };
        let column = tok.column;
        let value = match tok.value {
            Tok::Word(w) => Value::Word(w),
            Tok::Int(n) => Value::Int(n),
            Tok::Str(s) => Value::Str(s),
            Tok::LBrace => {
                let mut items = Vec::new();
                loop {
                    let Some(t) = it.next() else {
                        return Err(Diagnostic::error(
                            self.span(line, column),
                            "malformed attribute: unterminated set",
                        ));
                    };
                    match t.value {
                        Tok::RBrace if items.is_empty() => break,
                        Tok::Word(name) => {
                            let mut target = None;
                            if matches!(it.peek(), Some(Spanned { value: Tok::At, .. })) {
                                it.next();
                                match it.next() {
                                    Some(Spanned { value: Tok::Word(w), .. }) => target = Some(w),
                                    _ => {
                                        return Err(Diagnostic::error(
                                            self.span(line, t.column),
                                            "malformed attribute: expected a name after '@'",
                                        ))
                                    }
                                }
                            }
                            items.push(SetItem { name, target });
                            match it.next() {
                                Some(Spanned { value: Tok::Comma, .. }) => {}
                                Some(Spanned { value: Tok::RBrace, .. }) => break,
                                _ => {
                                    return Err(Diagnostic::error(
                                        self.span(line, t.column),
                                        "malformed attribute: expected ',' or '}' in set",
                                    ))
                                }
                            }
                        }
                        _ => {
                            return Err(Diagnostic::error(
                                self.span(line, t.column),
                                "malformed attribute: expected a name in set",
                            ))
                        }
                    }
                }
                Value::Set(items)
            }
            _ => {
                return Err(Diagnostic::error(
                    self.span(line, column),
                    "malformed attribute: unexpected value",
                ))
            }
        };
        Ok(Spanned { value, column })
    }
}

/// Typed access to a statement's attributes with diagnostics on misuse.
pub struct Attrs<'s> {
    stmt: &'s Statement,
    lexer: &'s Lexer<'s>,
    used: Vec<bool>,
    flags_used: Vec<bool>,
    pub diags: Vec<Diagnostic>,
}

impl<'s> Attrs<'s> {
    pub fn new(stmt: &'s Statement, lexer: &'s Lexer<'s>) -> Self {
        Attrs {
            stmt,
            lexer,
            used: vec![false; stmt.attrs.len()],
            flags_used: vec![false; stmt.flags.len()],
            diags: Vec::new(),
        }
    }

    pub fn span_at(&self, column: usize) -> SourceSpan {
        self.lexer.span(self.stmt.line, column)
    }

    fn error(&mut self, column: usize, msg: String) {
        self.diags
            .push(Diagnostic::error(self.span_at(column), msg));
    }

    /// Positional identifiers; exactly `n` are required.
    pub fn idents(&mut self, n: usize, what: &str) -> Option<Vec<Spanned<String>>> {
        let pos: Vec<_> = self
            .stmt
            .positionals
            .iter()
            .filter(|p| !matches!(p.value, Value::Str(_)))
            .collect();
        if pos.len() != n {
            let col = pos
                .get(n)
                .map(|p| p.column)
                .unwrap_or(self.stmt.keyword.column);
            self.error(
                col,
                format!("{} expects {n} {what}, found {}", self.stmt.keyword.value, pos.len()),
            );
            return None;
        }
        let mut out = Vec::new();
        for p in pos {
            match &p.value {
                Value::Word(w) if is_ident(w) => out.push(Spanned { value: w.clone(), column: p.column }),
                _ => {
                    self.error(p.column, "expected an identifier".to_string());
                    return None;
                }
            }
        }
        Some(out)
    }

    /// Optional quoted positional (goal labels).
    pub fn label(&mut self) -> Option<String> {
        self.stmt.positionals.iter().find_map(|p| match &p.value {
            Value::Str(s) => Some(s.clone()),
            _ => None,
        })
    }

    fn take(&mut self, key: &str) -> Option<&'s Spanned<Value>> {
        let mut found = None;
        for (i, (k, v)) in self.stmt.attrs.iter().enumerate() {
            if k.value == key {
                if found.is_some() {
                    self.diags.push(Diagnostic::error(
                        self.lexer.span(self.stmt.line, k.column),
                        format!("duplicate attribute '{key}'"),
                    ));
                }
                self.used[i] = true;
                found = Some(v);
            }
        }
        found
    }

    fn missing(&mut self, key: &str) {
        let col = self.stmt.keyword.column;
        self.error(col, format!("missing attribute '{key}'"));
    }

    pub fn ident(&mut self, key: &str, required: bool) -> Option<Spanned<String>> {
        match self.take(key) {
            None => {
                if required {
                    self.missing(key);
                }
                None
            }
            Some(Spanned { value: Value::Word(w), column }) if is_ident(w) => {
                Some(Spanned { value: w.clone(), column: *column })
            }
            Some(v) => {
                self.error(v.column, format!("malformed attribute '{key}': expected an identifier"));
                None
            }
        }
    }

    pub fn word(&mut self, key: &str, required: bool) -> Option<Spanned<String>> {
        match self.take(key) {
            None => {
                if required {
                    self.missing(key);
                }
                None
            }
            Some(Spanned { value: Value::Word(w), column }) => {
                Some(Spanned { value: w.clone(), column: *column })
            }
            Some(v) => {
                self.error(v.column, format!("malformed attribute '{key}': expected a word, found {}", v.value.describe()));
                None
            }
        }
    }

    pub fn int(&mut self, key: &str, required: bool) -> Option<u64> {
        match self.take(key) {
            None => {
                if required {
                    self.missing(key);
                }
                None
            }
            Some(Spanned { value: Value::Int(n), .. }) => Some(*n),
            Some(v) => {
                self.error(v.column, format!("malformed attribute '{key}': expected an integer"));
                None
            }
        }
    }

    pub fn string(&mut self, key: &str, required: bool) -> Option<String> {
        match self.take(key) {
            None => {
                if required {
                    self.missing(key);
                }
                None
            }
            Some(Spanned { value: Value::Str(s), .. }) => Some(s.clone()),
            Some(v) => {
                self.error(v.column, format!("malformed attribute '{key}': expected a quoted string"));
                None
            }
        }
    }

    /// A `{...}` set; a bare word is accepted as a singleton.
    pub fn set(&mut self, key: &str, required: bool) -> Option<Spanned<Vec<SetItem>>> {
        match self.take(key) {
            None => {
                if required {
                    self.missing(key);
                }
                None
            }
            Some(Spanned { value: Value::Set(items), column }) => {
                Some(Spanned { value: items.clone(), column: *column })
            }
            Some(Spanned { value: Value::Word(w), column }) => Some(Spanned {
                value: vec![SetItem { name: w.clone(), target: None }],
                column: *column,
            }),
            Some(v) => {
                self.error(v.column, format!("malformed attribute '{key}': expected a set"));
                None
            }
        }
    }

    pub fn flag(&mut self, name: &str) -> bool {
        let mut hit = false;
        for (i, f) in self.stmt.flags.iter().enumerate() {
            if f.value == name {
                self.flags_used[i] = true;
                hit = true;
            }
        }
        hit
    }

    /// Reports attributes and flags that no accessor consumed.
    pub fn finish(mut self) -> Vec<Diagnostic> {
        for (i, (k, _)) in self.stmt.attrs.iter().enumerate() {
            if !self.used[i] {
                self.diags.push(Diagnostic::error(
                    self.lexer.span(self.stmt.line, k.column),
                    format!("unknown attribute '{}' for {}", k.value, self.stmt.keyword.value),
                ));
            }
        }
        for (i, f) in self.stmt.flags.iter().enumerate() {
            if !self.flags_used[i] {
                self.diags.push(Diagnostic::error(
                    self.lexer.span(self.stmt.line, f.column),
                    format!("unknown flag '{}' for {}", f.value, self.stmt.keyword.value),
                ));
            }
        }
        self.diags
    }
}
