use std::collections::BTreeSet;

use crate::datalog::{Fact, Value};
use crate::model::*;

fn sym(s: &str) -> Value {
    Value::sym(s)
}

fn int(t: Tick) -> Value {
    Value::Int(t as i64)
}

fn check(b: bool) -> Value {
    sym(if b { "b" } else { "nb" })
}

pub fn op_name(op: Operation) -> &'static str {
    op.name()
}

/// Ground facts for every element and relation of `model`.
///
/// Sums that the rules compare against (expiry of a production, deadline of
/// a send) are computed here since the rule language has no arithmetic.
pub fn extract_facts(model: &GoalModel) -> BTreeSet<Fact> {
    let mut out = BTreeSet::new();
    let mut add = |pred: &str, args: Vec<Value>| {
        out.insert(Fact::new(pred, args));
    };
    for a in model.actors.values() {
        let kind = match a.kind {
            ActorKind::Agent => "agent",
            ActorKind::Role => "role",
        };
        add("actor", vec![sym(&a.id), sym(kind)]);
        for r in &a.plays {
            add("plays", vec![sym(&a.id), sym(r)]);
        }
    }
    for g in model.goals.values() {
        add("goal", vec![sym(&g.id), sym(&g.actor)]);
    }
    for d in model.decompositions.values() {
        let kind = match d.kind {
            DecompositionKind::And => "and",
            DecompositionKind::Or => "or",
        };
        for c in &d.children {
            add("decomposes", vec![sym(&d.parent), sym(kind), sym(c)]);
        }
    }
    for i in model.information.values() {
        add("info", vec![sym(&i.id), int(i.volatility), sym(&i.owner)]);
        for p in &i.parts {
            add("partof", vec![sym(p), sym(&i.id)]);
        }
    }
    for p in model.produces.values() {
        add("produces", vec![sym(&p.goal), sym(&p.info), check(p.believability_check), int(p.produced_at)]);
        if let Some(i) = model.information.get(&p.info) {
            add("prod_expiry", vec![sym(&p.info), int(p.produced_at), int(p.produced_at + i.volatility)]);
        }
    }
    for r in model.reads.values() {
        let ty = match r.read_type {
            ReadType::Required => "required",
            ReadType::Optional => "optional",
        };
        add(
            "reads",
            vec![
                sym(&r.goal),
                sym(&r.info),
                sym(ty),
                check(r.believability_check),
                sym(r.purpose.trim()),
                int(r.read_at),
            ],
        );
        for p in &r.required_parts {
            add("requires_part", vec![sym(&r.goal), sym(&r.info), sym(p)]);
        }
    }
    for m in model.modifies.values() {
        add("modifies", vec![sym(&m.goal), sym(&m.info)]);
    }
    for s in model.sends.values() {
        add(
            "sends",
            vec![sym(&s.goal), sym(&s.info), sym(&s.destination), int(s.timeliness), int(s.sent_at)],
        );
        add(
            "send_deadline",
            vec![sym(&s.goal), sym(&s.info), sym(&s.destination), int(s.sent_at + s.timeliness)],
        );
    }
    for p in model.provisions.values() {
        let kind = match p.kind {
            ProvisionKind::P => "p",
            ProvisionKind::IP => "ip",
        };
        add(
            "provides",
            vec![sym(&p.source), sym(&p.target), sym(&p.info), sym(kind), int(p.transmission_time)],
        );
    }
    for d in &model.delegations {
        match &d.subject {
            DelegationSubject::Goal(g) => {
                add("delegates_goal", vec![sym(g), sym(&d.delegator), sym(&d.delegatee)])
            }
            DelegationSubject::Permission(p) => {
                add("delegates_perm", vec![sym(p), sym(&d.delegator), sym(&d.delegatee)])
            }
        }
    }
    for g in model.permissions.values() {
        add("grant_by", vec![sym(&g.id), sym(&g.grantor)]);
        for op in &g.ops {
            add("permitted", vec![sym(&g.id), sym(&g.grantee), sym(&g.info), sym(op_name(*op))]);
        }
    }
    for t in &model.trust {
        let pred = match t.polarity {
            TrustPolarity::Trust => "trusts",
            TrustPolarity::Distrust => "distrusts",
        };
        let (kind, scope) = match &t.scope {
            TrustScope::ProducedInfo(i) => ("info", i),
            TrustScope::Goal(g) => ("goal", g),
            TrustScope::Permission(p) => ("permission", p),
        };
        add(pred, vec![sym(&t.trustor), sym(&t.trustee), sym(kind), sym(scope)]);
    }
    out
}
