use std::collections::BTreeSet;

use super::diag::{Diagnostic, ParseResult, Parsed};
use super::lexer::{is_ident, Attrs, Lexer, SetItem, Spanned, Statement, Value};
use crate::model::*;

/// Parses a `.gqm` goal-model document.
///
/// Every element must be declared before it is referenced. Any error
/// diagnostic means no model is returned.
pub fn parse_goal_model(text: &str, file: &str) -> ParseResult<GoalModel> {
    let lexer = Lexer::new(file);
    let (stmts, mut diags) = lexer.statements(text);
    let mut b = Builder {
        lexer: &lexer,
        model: GoalModel::new(),
        diags: Vec::new(),
    };
    for stmt in &stmts {
        b.statement(stmt);
    }
    diags.extend(b.diags);
    if diags.iter().any(Diagnostic::is_error) {
        diags.sort_by(|a, b| a.span.cmp(&b.span));
        return Err(diags);
    }
    Ok(Parsed {
        value: b.model,
        warnings: diags,
    })
}

struct Builder<'a> {
    lexer: &'a Lexer<'a>,
    model: GoalModel,
    diags: Vec<Diagnostic>,
}

impl<'a> Builder<'a> {
    fn err(&mut self, line: usize, column: usize, msg: impl Into<String>) {
        self.diags
            .push(Diagnostic::error(self.lexer.span(line, column), msg));
    }

    fn actor_ref(&mut self, line: usize, id: &Spanned<String>) -> bool {
        if self.model.actors.contains_key(&id.value) {
            true
        } else {
            self.err(line, id.column, format!("undefined actor '{}'", id.value));
            false
        }
    }

    fn goal_ref(&mut self, line: usize, id: &Spanned<String>) -> bool {
        if self.model.goals.contains_key(&id.value) {
            true
        } else {
            self.err(line, id.column, format!("undefined goal '{}'", id.value));
            false
        }
    }

    fn info_ref(&mut self, line: usize, id: &Spanned<String>) -> bool {
        if self.model.information.contains_key(&id.value) {
            true
        } else {
            self.err(line, id.column, format!("undefined information '{}'", id.value));
            false
        }
    }

    fn info_set(&mut self, line: usize, items: &Spanned<Vec<SetItem>>) -> Option<BTreeSet<Id>> {
        let mut out = BTreeSet::new();
        let mut ok = true;
        for item in &items.value {
            let sp = Spanned { value: item.name.clone(), column: items.column };
            if item.target.is_some() || !is_ident(&item.name) {
                self.err(line, items.column, format!("malformed set item '{}'", item.name));
                ok = false;
            } else if !self.info_ref(line, &sp) {
                ok = false;
            } else {
                out.insert(item.name.clone());
            }
        }
        ok.then_some(out)
    }

    fn check_flag(&mut self, line: usize, v: &Spanned<String>, yes: &str, no: &str) -> Option<bool> {
        if v.value == yes {
            Some(true)
        } else if v.value == no {
            Some(false)
        } else {
            self.err(
                line,
                v.column,
                format!("malformed attribute: expected {yes} or {no}, found '{}'", v.value),
            );
            None
        }
    }

    fn statement(&mut self, stmt: &Statement) {
        let line = stmt.line;
        let mut a = Attrs::new(stmt, self.lexer);
        match stmt.keyword.value.as_str() {
            "actor" => self.actor(stmt, &mut a),
            "goal" => self.goal(stmt, &mut a),
            "decompose" => {
                self.decompose(stmt);
                // positionals only
                for (k, _) in &stmt.attrs {
                    self.err(line, k.column, format!("unknown attribute '{}' for decompose", k.value));
                }
                for f in &stmt.flags {
                    self.err(line, f.column, format!("unknown flag '{}' for decompose", f.value));
                }
                return;
            }
            "info" => self.info(stmt, &mut a),
            "partof" => self.partof(stmt, &mut a),
            "produce" => self.produce(stmt, &mut a),
            "read" => self.read(stmt, &mut a),
            "modify" => self.modify(stmt, &mut a),
            "send" => self.send(stmt, &mut a),
            "provide" => self.provide(stmt, &mut a),
            "delegate" => self.delegate(stmt, &mut a),
            "permit" => self.permit(stmt, &mut a),
            "trust" => self.trust(stmt, &mut a, TrustPolarity::Trust),
            "distrust" => self.trust(stmt, &mut a, TrustPolarity::Distrust),
            other => {
                self.err(line, stmt.keyword.column, format!("unknown keyword '{other}'"));
                return;
            }
        }
        let rest = a.finish();
        self.diags.extend(rest);
    }

    fn actor(&mut self, stmt: &Statement, a: &mut Attrs) {
        let line = stmt.line;
        let ids = a.idents(1, "identifier");
        let kind = a.word("kind", true);
        let plays = a.set("plays", false);
        let (Some(ids), Some(kind)) = (ids, kind) else { return };
        let kind = match kind.value.as_str() {
            "agent" => ActorKind::Agent,
            "role" => ActorKind::Role,
            other => {
                self.err(line, kind.column, format!("malformed attribute: unknown actor kind '{other}'"));
                return;
            }
        };
        let mut roles = BTreeSet::new();
        if let Some(p) = plays {
            for item in &p.value {
                let sp = Spanned { value: item.name.clone(), column: p.column };
                if self.actor_ref(line, &sp) {
                    roles.insert(item.name.clone());
                }
            }
        }
        let id = &ids[0];
        if self.model.actors.contains_key(&id.value) {
            self.err(line, id.column, format!("duplicate actor '{}'", id.value));
            return;
        }
        self.model.actors.insert(
            id.value.clone(),
            Actor { id: id.value.clone(), kind, plays: roles },
        );
    }

    fn goal(&mut self, stmt: &Statement, a: &mut Attrs) {
        let line = stmt.line;
        let ids = a.idents(1, "identifier");
        let label = a.label().unwrap_or_default();
        let actor = a.ident("actor", true);
        let atomic = a.flag("atomic-no-info");
        let excluded = a.flag("exclude");
        let (Some(ids), Some(actor)) = (ids, actor) else { return };
        if !self.actor_ref(line, &actor) {
            return;
        }
        let id = &ids[0];
        if self.model.goals.contains_key(&id.value) {
            self.err(line, id.column, format!("duplicate goal '{}'", id.value));
            return;
        }
        self.model.goals.insert(
            id.value.clone(),
            Goal {
                id: id.value.clone(),
                label,
                actor: actor.value,
                atomic_no_info: atomic,
                excluded,
            },
        );
    }

    fn decompose(&mut self, stmt: &Statement) {
        let line = stmt.line;
        let mut words = Vec::new();
        for p in &stmt.positionals {
            match &p.value {
                Value::Word(w) => words.push(Spanned { value: w.clone(), column: p.column }),
                _ => {
                    self.err(line, p.column, "expected an identifier");
                    return;
                }
            }
        }
        if words.len() < 2 {
            self.err(line, stmt.keyword.column, "decompose expects a parent, a kind and children");
            return;
        }
        let parent = &words[0];
        let kind = match words[1].value.as_str() {
            "and" => DecompositionKind::And,
            "or" => DecompositionKind::Or,
            other => {
                self.err(line, words[1].column, format!("expected 'and' or 'or', found '{other}'"));
                return;
            }
        };
        let mut ok = self.goal_ref(line, parent);
        let mut children = Vec::new();
        for c in &words[2..] {
            ok &= self.goal_ref(line, c);
            children.push(c.value.clone());
        }
        if !ok {
            return;
        }
        if self.model.decompositions.contains_key(&parent.value) {
            self.err(line, parent.column, format!("goal '{}' is already decomposed", parent.value));
            return;
        }
        self.model.decompositions.insert(
            parent.value.clone(),
            Decomposition { parent: parent.value.clone(), kind, children },
        );
    }

    fn info(&mut self, stmt: &Statement, a: &mut Attrs) {
        let line = stmt.line;
        let ids = a.idents(1, "identifier");
        let vol = a.int("volatility", true);
        let owner = a.ident("owner", true);
        let (Some(ids), Some(vol), Some(owner)) = (ids, vol, owner) else { return };
        if !self.actor_ref(line, &owner) {
            return;
        }
        let id = &ids[0];
        if self.model.information.contains_key(&id.value) {
            self.err(line, id.column, format!("duplicate information '{}'", id.value));
            return;
        }
        self.model.information.insert(
            id.value.clone(),
            Information {
                id: id.value.clone(),
                volatility: vol,
                owner: owner.value,
                parts: BTreeSet::new(),
            },
        );
    }

    fn partof(&mut self, stmt: &Statement, a: &mut Attrs) {
        let line = stmt.line;
        let Some(ids) = a.idents(2, "identifiers") else { return };
        if !(self.info_ref(line, &ids[0]) & self.info_ref(line, &ids[1])) {
            return;
        }
        let whole = self.model.information.get_mut(&ids[1].value).unwrap();
        if !whole.parts.insert(ids[0].value.clone()) {
            self.err(line, ids[0].column, "duplicate partof relation");
        }
    }

    fn goal_info(&mut self, stmt: &Statement, a: &mut Attrs) -> Option<(Id, Id)> {
        let line = stmt.line;
        let ids = a.idents(2, "identifiers")?;
        if !(self.goal_ref(line, &ids[0]) & self.info_ref(line, &ids[1])) {
            return None;
        }
        Some((ids[0].value.clone(), ids[1].value.clone()))
    }

    fn produce(&mut self, stmt: &Statement, a: &mut Attrs) {
        let gi = self.goal_info(stmt, a);
        let check = a.word("check", true);
        let at = a.int("at", true);
        let (Some((goal, info)), Some(check), Some(at)) = (gi, check, at) else { return };
        let Some(check) = self.check_flag(stmt.line, &check, "B", "NB") else { return };
        let key = (goal.clone(), info.clone());
        if self.model.produces.contains_key(&key) {
            self.err(stmt.line, stmt.keyword.column, format!("duplicate produce relation ({goal}, {info})"));
            return;
        }
        self.model.produces.insert(
            key,
            ProduceRel { goal, info, believability_check: check, produced_at: at },
        );
    }

    fn read(&mut self, stmt: &Statement, a: &mut Attrs) {
        let line = stmt.line;
        let gi = self.goal_info(stmt, a);
        let ty = a.word("type", true);
        let check = a.word("check", true);
        let purpose = a.string("purpose", true);
        let parts = a.set("parts", false);
        let at = a.int("at", true);
        let (Some((goal, info)), Some(ty), Some(check), Some(purpose), Some(at)) =
            (gi, ty, check, purpose, at)
        else {
            return;
        };
        let read_type = match ty.value.as_str() {
            "R" => ReadType::Required,
            "O" => ReadType::Optional,
            other => {
                self.err(line, ty.column, format!("malformed attribute: expected R or O, found '{other}'"));
                return;
            }
        };
        let Some(check) = self.check_flag(line, &check, "B", "NB") else { return };
        let required_parts = match parts {
            Some(p) => match self.info_set(line, &p) {
                Some(s) => s,
                None => return,
            },
            None => BTreeSet::new(),
        };
        let key = (goal.clone(), info.clone());
        if self.model.reads.contains_key(&key) {
            self.err(line, stmt.keyword.column, format!("duplicate read relation ({goal}, {info})"));
            return;
        }
        self.model.reads.insert(
            key,
            ReadRel {
                goal,
                info,
                read_type,
                believability_check: check,
                purpose,
                required_parts,
                read_at: at,
            },
        );
    }

    fn modify(&mut self, stmt: &Statement, a: &mut Attrs) {
        let gi = self.goal_info(stmt, a);
        let at = a.int("at", false);
        let Some((goal, info)) = gi else { return };
        let key = (goal.clone(), info.clone());
        if self.model.modifies.contains_key(&key) {
            self.err(stmt.line, stmt.keyword.column, format!("duplicate modify relation ({goal}, {info})"));
            return;
        }
        self.model.modifies.insert(key, ModifyRel { goal, info, at });
    }

    fn send(&mut self, stmt: &Statement, a: &mut Attrs) {
        let line = stmt.line;
        let gi = self.goal_info(stmt, a);
        let to = a.ident("to", true);
        let timeliness = a.int("timeliness", true);
        let at = a.int("at", true);
        let (Some((goal, info)), Some(to), Some(timeliness), Some(at)) = (gi, to, timeliness, at)
        else {
            return;
        };
        if !self.actor_ref(line, &to) {
            return;
        }
        let key = (goal.clone(), info.clone(), to.value.clone());
        if self.model.sends.contains_key(&key) {
            self.err(line, stmt.keyword.column, format!("duplicate send relation ({goal}, {info}, {})", to.value));
            return;
        }
        self.model.sends.insert(
            key,
            SendRel { goal, info, destination: to.value, timeliness, sent_at: at },
        );
    }

    fn provide(&mut self, stmt: &Statement, a: &mut Attrs) {
        let line = stmt.line;
        let ids = a.idents(3, "identifiers");
        let kind = a.word("kind", true);
        let time = a.int("time", true);
        let (Some(ids), Some(kind), Some(time)) = (ids, kind, time) else { return };
        let ok = self.actor_ref(line, &ids[0]) & self.actor_ref(line, &ids[1]) & self.info_ref(line, &ids[2]);
        if !ok {
            return;
        }
        let kind = match kind.value.as_str() {
            "P" => ProvisionKind::P,
            "IP" => ProvisionKind::IP,
            other => {
                self.err(line, kind.column, format!("malformed attribute: expected P or IP, found '{other}'"));
                return;
            }
        };
        let key = (ids[0].value.clone(), ids[1].value.clone(), ids[2].value.clone());
        if self.model.provisions.contains_key(&key) {
            self.err(line, stmt.keyword.column, "duplicate provision");
            return;
        }
        self.model.provisions.insert(
            key,
            Provision {
                source: ids[0].value.clone(),
                target: ids[1].value.clone(),
                info: ids[2].value.clone(),
                kind,
                transmission_time: time,
            },
        );
    }

    fn delegate(&mut self, stmt: &Statement, a: &mut Attrs) {
        let line = stmt.line;
        let ids = a.idents(2, "actors");
        let goal = a.ident("goal", false);
        let perm = a.ident("permission", false);
        let Some(ids) = ids else { return };
        let ok = self.actor_ref(line, &ids[0]) & self.actor_ref(line, &ids[1]);
        let subject = match (goal, perm) {
            (Some(g), None) => {
                if !self.goal_ref(line, &g) {
                    return;
                }
                DelegationSubject::Goal(g.value)
            }
            (None, Some(p)) => {
                if !self.model.permissions.contains_key(&p.value) {
                    self.err(line, p.column, format!("undefined permission '{}'", p.value));
                    return;
                }
                DelegationSubject::Permission(p.value)
            }
            _ => {
                self.err(line, stmt.keyword.column, "delegate expects exactly one of goal= or permission=");
                return;
            }
        };
        if !ok {
            return;
        }
        let d = Delegation {
            delegator: ids[0].value.clone(),
            delegatee: ids[1].value.clone(),
            subject,
        };
        if !self.model.delegations.insert(d) {
            self.err(line, stmt.keyword.column, "duplicate delegation");
        }
    }

    fn permit(&mut self, stmt: &Statement, a: &mut Attrs) {
        let line = stmt.line;
        let ids = a.idents(1, "identifier");
        let from = a.ident("from", true);
        let to = a.ident("to", true);
        let info = a.ident("info", true);
        let ops = a.set("ops", true);
        let (Some(ids), Some(from), Some(to), Some(info), Some(ops)) = (ids, from, to, info, ops)
        else {
            return;
        };
        let ok = self.actor_ref(line, &from) & self.actor_ref(line, &to) & self.info_ref(line, &info);
        let mut set = BTreeSet::new();
        for item in &ops.value {
            match Operation::from_letter(&item.name) {
                Some(op) if item.target.is_none() => {
                    set.insert(op);
                }
                _ => {
                    self.err(line, ops.column, format!("malformed attribute: unknown operation '{}'", item.name));
                    return;
                }
            }
        }
        if !ok {
            return;
        }
        let id = &ids[0];
        if self.model.permissions.contains_key(&id.value) {
            self.err(line, id.column, format!("duplicate permission '{}'", id.value));
            return;
        }
        self.model.permissions.insert(
            id.value.clone(),
            PermissionGrant {
                id: id.value.clone(),
                grantor: from.value,
                grantee: to.value,
                info: info.value,
                ops: set,
            },
        );
    }

    fn trust(&mut self, stmt: &Statement, a: &mut Attrs, polarity: TrustPolarity) {
        let line = stmt.line;
        let ids = a.idents(2, "actors");
        let info = a.ident("info", false);
        let goal = a.ident("goal", false);
        let perm = a.ident("permission", false);
        let Some(ids) = ids else { return };
        let ok = self.actor_ref(line, &ids[0]) & self.actor_ref(line, &ids[1]);
        let scope = match (info, goal, perm) {
            (Some(i), None, None) => {
                if !self.info_ref(line, &i) {
                    return;
                }
                TrustScope::ProducedInfo(i.value)
            }
            (None, Some(g), None) => {
                if !self.goal_ref(line, &g) {
                    return;
                }
                TrustScope::Goal(g.value)
            }
            (None, None, Some(p)) => {
                if !self.model.permissions.contains_key(&p.value) {
                    self.err(line, p.column, format!("undefined permission '{}'", p.value));
                    return;
                }
                TrustScope::Permission(p.value)
            }
            _ => {
                self.err(
                    line,
                    stmt.keyword.column,
                    format!("{} expects exactly one of info=, goal= or permission=", stmt.keyword.value),
                );
                return;
            }
        };
        if !ok {
            return;
        }
        let rel = TrustRel {
            trustor: ids[0].value.clone(),
            trustee: ids[1].value.clone(),
            polarity,
            scope,
        };
        if !self.model.trust.insert(rel) {
            self.err(line, stmt.keyword.column, "duplicate trust relation");
        }
    }
}
