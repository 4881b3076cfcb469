use std::collections::BTreeSet;

use super::diag::{Diagnostic, ParseResult, Parsed};
use super::lexer::{is_ident, Attrs, Lexer, SetItem, Spanned, Statement};
use crate::model::Id;
use crate::wfa::{Transition, WfaNet};

/// Parses a `.wfa` net document.
///
/// Reference errors are fatal. Alternation breaches and WF-net shape problems
/// are reported as warnings so the net can still be audited.
pub fn parse_wfa_net(text: &str, file: &str) -> ParseResult<WfaNet> {
    let lexer = Lexer::new(file);
    let (stmts, mut diags) = lexer.statements(text);
    let mut b = NetBuilder {
        lexer: &lexer,
        net: WfaNet::default(),
        initial: None,
        final_place: None,
        arc_lines: Vec::new(),
        diags: Vec::new(),
    };
    for s in &stmts {
        b.statement(s);
    }
    let NetBuilder {
        net: mut wfa,
        initial,
        final_place,
        arc_lines,
        diags: extra,
        ..
    } = b;
    diags.extend(extra);
    let eof = lexer.span(text.lines().count().max(1), 1);
    match initial {
        Some(p) => wfa.initial = p,
        None => diags.push(Diagnostic::error(eof.clone(), "missing 'initial' statement")),
    }
    match final_place {
        Some(p) => wfa.final_place = p,
        None => diags.push(Diagnostic::error(eof, "missing 'final' statement")),
    }
    if diags.iter().any(Diagnostic::is_error) {
        diags.sort_by(|a, b| a.span.cmp(&b.span));
        return Err(diags);
    }
    for issue in wfa.structure_issues() {
        let span = match &issue {
            crate::wfa::StructureIssue::ConsecutivePlaces(a, b)
            | crate::wfa::StructureIssue::ConsecutiveTransitions(a, b) => arc_lines
                .iter()
                .find(|(f, t, _)| f == a && t == b)
                .map(|(_, _, sp)| sp.clone()),
            _ => None,
        }
        .unwrap_or_else(|| lexer.span(1, 1));
        diags.push(Diagnostic::warning(span, issue.to_string()));
    }
    Ok(Parsed { value: wfa, warnings: diags })
}

struct NetBuilder<'a> {
    lexer: &'a Lexer<'a>,
    net: WfaNet,
    initial: Option<Id>,
    final_place: Option<Id>,
    arc_lines: Vec<(Id, Id, super::diag::SourceSpan)>,
    diags: Vec<Diagnostic>,
}

impl<'a> NetBuilder<'a> {
    fn err(&mut self, line: usize, column: usize, msg: impl Into<String>) {
        self.diags
            .push(Diagnostic::error(self.lexer.span(line, column), msg));
    }

    fn declared(&self, id: &str) -> bool {
        self.net.node_kind(id).is_some()
    }

    fn statement(&mut self, stmt: &Statement) {
        let line = stmt.line;
        let mut a = Attrs::new(stmt, self.lexer);
        match stmt.keyword.value.as_str() {
            "place" => {
                if let Some(ids) = a.idents(1, "identifier") {
                    let id = &ids[0];
                    if self.declared(&id.value) {
                        self.err(line, id.column, format!("duplicate node '{}'", id.value));
                    } else {
                        self.net.add_place(id.value.clone());
                    }
                }
            }
            "trans" => self.transition(stmt, &mut a),
            "arc" => {
                if let Some(ids) = a.idents(2, "nodes") {
                    let mut ok = true;
                    for id in &ids {
                        if !self.declared(&id.value) {
                            self.err(line, id.column, format!("undefined node '{}'", id.value));
                            ok = false;
                        }
                    }
                    if ok {
                        let key = (ids[0].value.clone(), ids[1].value.clone());
                        if self.net.arcs.contains(&key) {
                            self.err(line, stmt.keyword.column, "duplicate arc");
                        } else {
                            self.arc_lines.push((
                                key.0.clone(),
                                key.1.clone(),
                                self.lexer.span(line, stmt.keyword.column),
                            ));
                            self.net.arcs.insert(key);
                        }
                    }
                }
            }
            kw @ ("initial" | "final") => {
                if let Some(ids) = a.idents(1, "place") {
                    let id = &ids[0];
                    let slot_taken = if kw == "initial" {
                        self.initial.is_some()
                    } else {
                        self.final_place.is_some()
                    };
                    if !self.net.places.contains(&id.value) {
                        self.err(line, id.column, format!("undefined place '{}'", id.value));
                    } else if slot_taken {
                        self.err(line, stmt.keyword.column, format!("duplicate '{kw}' statement"));
                    } else if kw == "initial" {
                        self.initial = Some(id.value.clone());
                    } else {
                        self.final_place = Some(id.value.clone());
                    }
                }
            }
            other => {
                self.err(line, stmt.keyword.column, format!("unknown keyword '{other}'"));
                return;
            }
        }
        let rest = a.finish();
        self.diags.extend(rest);
    }

    fn names(&mut self, line: usize, set: Option<Spanned<Vec<SetItem>>>) -> Option<BTreeSet<Id>> {
        let Some(set) = set else { return Some(BTreeSet::new()) };
        let mut out = BTreeSet::new();
        for item in set.value {
            if item.target.is_some() || !is_ident(&item.name) {
                self.err(line, set.column, format!("malformed set item '{}'", item.name));
                return None;
            }
            out.insert(item.name);
        }
        Some(out)
    }

    fn transition(&mut self, stmt: &Statement, a: &mut Attrs) {
        let line = stmt.line;
        let ids = a.idents(1, "identifier");
        let res = a.ident("res", true);
        let pd = a.set("pd", false);
        let rd = a.set("rd", false);
        let md = a.set("md", false);
        let sd = a.set("sd", false);
        let (Some(ids), Some(res)) = (ids, res) else { return };
        let (Some(pd), Some(rd), Some(md)) = (
            self.names(line, pd),
            self.names(line, rd),
            self.names(line, md),
        ) else {
            return;
        };
        let mut sends = BTreeSet::new();
        if let Some(sd) = sd {
            for item in sd.value {
                match item.target {
                    Some(t) if is_ident(&item.name) && is_ident(&t) => {
                        sends.insert((item.name, t));
                    }
                    _ => {
                        self.err(line, sd.column, format!("malformed sd item '{}': expected info@actor", item.name));
                        return;
                    }
                }
            }
        }
        let id = &ids[0];
        if self.declared(&id.value) {
            self.err(line, id.column, format!("duplicate node '{}'", id.value));
            return;
        }
        self.net.add_transition(Transition {
            id: id.value.clone(),
            res: res.value,
            pd,
            rd,
            md,
            sd: sends,
        });
    }
}
