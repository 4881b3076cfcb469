use std::fmt::Write;

use crate::model::*;
use crate::wfa::WfaNet;

pub const GQM_HEADER: &str = "# wfav goal model";
pub const WFA_HEADER: &str = "# wfav workflow net with actors";

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn set<'a>(items: impl IntoIterator<Item = &'a String>) -> String {
    let v: Vec<&str> = items.into_iter().map(String::as_str).collect();
    format!("{{{}}}", v.join(","))
}

fn check(b: bool) -> &'static str {
    if b {
        "B"
    } else {
        "NB"
    }
}

/// Canonical `.gqm` text: statements grouped by kind and sorted by id, with
/// every referenced element declared before use.
pub fn print_goal_model(m: &GoalModel) -> String {
    let mut out = String::new();
    out.push_str(GQM_HEADER);
    out.push('\n');
    // roles first so that `plays` always refers backwards
    let mut actors: Vec<&Actor> = m.actors.values().collect();
    actors.sort_by_key(|a| (a.kind != ActorKind::Role, a.id.clone()));
    for a in actors {
        let kind = match a.kind {
            ActorKind::Agent => "agent",
            ActorKind::Role => "role",
        };
        write!(out, "actor {} kind={kind}", a.id).unwrap();
        if !a.plays.is_empty() {
            write!(out, " plays={}", set(&a.plays)).unwrap();
        }
        out.push('\n');
    }
    for i in m.information.values() {
        writeln!(out, "info {} volatility={} owner={}", i.id, i.volatility, i.owner).unwrap();
    }
    for i in m.information.values() {
        for p in &i.parts {
            writeln!(out, "partof {} {}", p, i.id).unwrap();
        }
    }
    for g in m.goals.values() {
        write!(out, "goal {} {} actor={}", g.id, quote(&g.label), g.actor).unwrap();
        if g.atomic_no_info {
            out.push_str(" atomic-no-info");
        }
        if g.excluded {
            out.push_str(" exclude");
        }
        out.push('\n');
    }
    for d in m.decompositions.values() {
        let kind = match d.kind {
            DecompositionKind::And => "and",
            DecompositionKind::Or => "or",
        };
        writeln!(out, "decompose {} {kind} {}", d.parent, d.children.join(" ")).unwrap();
    }
    for p in m.produces.values() {
        writeln!(
            out,
            "produce {} {} check={} at={}",
            p.goal,
            p.info,
            check(p.believability_check),
            p.produced_at
        )
        .unwrap();
    }
    for r in m.reads.values() {
        let ty = match r.read_type {
            ReadType::Required => "R",
            ReadType::Optional => "O",
        };
        write!(
            out,
            "read {} {} type={ty} check={} purpose={}",
            r.goal,
            r.info,
            check(r.believability_check),
            quote(&r.purpose)
        )
        .unwrap();
        if !r.required_parts.is_empty() {
            write!(out, " parts={}", set(&r.required_parts)).unwrap();
        }
        writeln!(out, " at={}", r.read_at).unwrap();
    }
    for r in m.modifies.values() {
        write!(out, "modify {} {}", r.goal, r.info).unwrap();
        if let Some(at) = r.at {
            write!(out, " at={at}").unwrap();
        }
        out.push('\n');
    }
    for s in m.sends.values() {
        writeln!(
            out,
            "send {} {} to={} timeliness={} at={}",
            s.goal, s.info, s.destination, s.timeliness, s.sent_at
        )
        .unwrap();
    }
    for p in m.provisions.values() {
        let kind = match p.kind {
            ProvisionKind::P => "P",
            ProvisionKind::IP => "IP",
        };
        writeln!(
            out,
            "provide {} {} {} kind={kind} time={}",
            p.source, p.target, p.info, p.transmission_time
        )
        .unwrap();
    }
    for g in m.permissions.values() {
        let ops: String = g.ops.iter().map(|o| o.letter().to_string()).collect::<Vec<_>>().join(",");
        writeln!(
            out,
            "permit {} from={} to={} info={} ops={{{ops}}}",
            g.id, g.grantor, g.grantee, g.info
        )
        .unwrap();
    }
    for d in &m.delegations {
        let subject = match &d.subject {
            DelegationSubject::Goal(g) => format!("goal={g}"),
            DelegationSubject::Permission(p) => format!("permission={p}"),
        };
        writeln!(out, "delegate {} {} {subject}", d.delegator, d.delegatee).unwrap();
    }
    for t in &m.trust {
        let kw = match t.polarity {
            TrustPolarity::Trust => "trust",
            TrustPolarity::Distrust => "distrust",
        };
        let scope = match &t.scope {
            TrustScope::Goal(g) => format!("goal={g}"),
            TrustScope::Permission(p) => format!("permission={p}"),
            TrustScope::ProducedInfo(i) => format!("info={i}"),
        };
        writeln!(out, "{kw} {} {} {scope}", t.trustor, t.trustee).unwrap();
    }
    out
}

/// Canonical `.wfa` text. Empty information sets are omitted.
pub fn print_wfa_net(n: &WfaNet) -> String {
    let mut out = String::new();
    out.push_str(WFA_HEADER);
    out.push('\n');
    for p in &n.places {
        writeln!(out, "place {p}").unwrap();
    }
    for t in n.transitions.values() {
        write!(out, "trans {} res={}", t.id, t.res).unwrap();
        for (key, items) in [("pd", &t.pd), ("rd", &t.rd), ("md", &t.md)] {
            if !items.is_empty() {
                write!(out, " {key}={}", set(items)).unwrap();
            }
        }
        if !t.sd.is_empty() {
            let items: Vec<String> = t.sd.iter().map(|(i, d)| format!("{i}@{d}")).collect();
            write!(out, " sd={{{}}}", items.join(",")).unwrap();
        }
        out.push('\n');
    }
    for (from, to) in &n.arcs {
        writeln!(out, "arc {from} {to}").unwrap();
    }
    writeln!(out, "initial {}", n.initial).unwrap();
    writeln!(out, "final {}", n.final_place).unwrap();
    out
}
