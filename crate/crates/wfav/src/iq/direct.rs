//! Procedural evaluation of the IQ dimensions, written independently of the
//! axiom program so that the two can be compared.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{Dimension, Facet, IqError, IqVerdict};
use crate::model::*;

struct Ctx<'m> {
    m: &'m GoalModel,
    res: BTreeMap<&'m str, Id>,
    perms: PermissionTable,
    /// info -> (source, target, kind) including copies for agents playing a target role
    edges: BTreeMap<&'m str, Vec<(Id, Id, ProvisionKind)>>,
    /// info -> actors responsible for a goal producing it
    producers: BTreeMap<&'m str, BTreeSet<Id>>,
}

impl<'m> Ctx<'m> {
    fn new(m: &'m GoalModel) -> Result<Self, IqError> {
        let mut res = BTreeMap::new();
        for g in m.goals.keys() {
            res.insert(g.as_str(), m.resolve_responsibility(g)?);
        }
        let mut edges: BTreeMap<&str, Vec<(Id, Id, ProvisionKind)>> = BTreeMap::new();
        for p in m.provisions.values() {
            let e = edges.entry(p.info.as_str()).or_default();
            e.push((p.source.clone(), p.target.clone(), p.kind));
            for agent in m.players_of(&p.target) {
                e.push((p.source.clone(), agent.clone(), p.kind));
            }
        }
        let mut producers: BTreeMap<&str, BTreeSet<Id>> = BTreeMap::new();
        for p in m.produces.values() {
            producers.entry(p.info.as_str()).or_default().insert(res[p.goal.as_str()].clone());
        }
        Ok(Ctx { m, res, perms: PermissionTable::compute(m), edges, producers })
    }

    fn res(&self, goal: &str) -> &str {
        &self.res[goal]
    }

    fn is_producer(&self, actor: &str, info: &str) -> bool {
        self.producers.get(info).is_some_and(|s| s.contains(actor))
    }

    fn edges(&self, info: &str) -> &[(Id, Id, ProvisionKind)] {
        self.edges.get(info).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Actors reachable from `start` by one or more provision edges.
    fn downstream(&self, info: &str, start: &str) -> BTreeSet<Id> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([start.to_string()]);
        while let Some(a) = queue.pop_front() {
            for (s, t, _) in self.edges(info) {
                if *s == a && seen.insert(t.clone()) {
                    queue.push_back(t.clone());
                }
            }
        }
        seen
    }

    /// Actors holding `info`: producers and everything they provide to.
    fn holders(&self, info: &str) -> BTreeSet<Id> {
        let mut out = BTreeSet::new();
        for p in self.producers.get(info).into_iter().flatten() {
            out.insert(p.clone());
            out.extend(self.downstream(info, p));
        }
        out
    }

    /// Actors from which `target` can be reached, including itself.
    fn upstream(&self, info: &str, target: &str) -> BTreeSet<Id> {
        let mut seen = BTreeSet::from([target.to_string()]);
        let mut queue = VecDeque::from([target.to_string()]);
        while let Some(a) = queue.pop_front() {
            for (s, t, _) in self.edges(info) {
                if *t == a && seen.insert(s.clone()) {
                    queue.push_back(s.clone());
                }
            }
        }
        seen
    }

    fn trust_edge(&self, actor: &str, producer: &str, info: &str, pol: TrustPolarity) -> bool {
        let subjects = std::iter::once(actor.to_string())
            .chain(self.m.actors.get(actor).into_iter().flat_map(|a| a.plays.iter().cloned()));
        let scope = TrustScope::ProducedInfo(info.to_string());
        subjects.into_iter().any(|s| {
            self.m.trust.contains(&TrustRel {
                trustor: s,
                trustee: producer.to_string(),
                polarity: pol,
                scope: scope.clone(),
            })
        })
    }
}

#[derive(Default)]
struct Acc {
    applies: BTreeSet<(Id, Id, Dimension)>,
    fails: BTreeMap<(Id, Id, Dimension), (BTreeSet<Facet>, BTreeSet<Id>)>,
}

impl Acc {
    fn applies(&mut self, g: &str, i: &str, d: Dimension) {
        self.applies.insert((g.to_string(), i.to_string(), d));
    }

    fn fail(&mut self, g: &str, i: &str, f: Facet, witness: impl IntoIterator<Item = Id>) {
        let e = self.fails.entry((g.to_string(), i.to_string(), f.dimension())).or_default();
        e.0.insert(f);
        e.1.extend(witness);
    }
}

/// Verdicts computed directly from the model.
pub fn analyze_direct(m: &GoalModel) -> Result<Vec<IqVerdict>, IqError> {
    let cx = Ctx::new(m)?;
    let mut acc = Acc::default();
    timestamps(&cx)?;
    accessibility(&cx, &mut acc);
    for p in m.produces.values() {
        acc.applies(&p.goal, &p.info, Dimension::Believability);
        acc.applies(&p.goal, &p.info, Dimension::Accuracy);
        if !p.believability_check {
            acc.fail(&p.goal, &p.info, Facet::ProduceCheck, [p.goal.clone()]);
            acc.fail(&p.goal, &p.info, Facet::ProductionAccuracy, [p.goal.clone()]);
        }
    }
    let unauthorised = unauthorised_actors(&cx);
    for r in m.reads.values() {
        let (g, i) = (r.goal.as_str(), r.info.as_str());
        for d in [
            Dimension::Believability,
            Dimension::Accuracy,
            Dimension::Trustworthiness,
            Dimension::Completeness,
            Dimension::Consistency,
        ] {
            acc.applies(g, i, d);
        }
        let mut accuracy_witness = BTreeSet::new();
        if !r.believability_check {
            acc.fail(g, i, Facet::ReadCheck, [r.goal.clone()]);
            accuracy_witness.insert(r.goal.clone());
        }
        let a = cx.res(g);
        let bad_sources: Vec<Id> = cx
            .producers
            .get(i)
            .into_iter()
            .flatten()
            .filter(|p| p.as_str() != a && cx.downstream(i, p).contains(a))
            .filter(|p| {
                !cx.trust_edge(a, p, i, TrustPolarity::Trust)
                    || cx.trust_edge(a, p, i, TrustPolarity::Distrust)
            })
            .cloned()
            .collect();
        if !bad_sources.is_empty() {
            acc.fail(g, i, Facet::SourceTrust, bad_sources.clone());
            accuracy_witness.extend(bad_sources);
        }
        if let Some(bad) = unauthorised.get(i) {
            acc.fail(g, i, Facet::ProvisionTrust, bad.iter().cloned());
            accuracy_witness.extend(bad.iter().cloned());
        }
        if !accuracy_witness.is_empty() {
            acc.fail(g, i, Facet::ReadAccuracy, accuracy_witness);
        }
        if !cx.is_producer(a, i) {
            let holders = cx.holders(i);
            let up = cx.upstream(i, a);
            let mut w = BTreeSet::new();
            for (s, t, k) in cx.edges(i) {
                if *k == ProvisionKind::P && holders.contains(s) && up.contains(t) {
                    w.insert(s.clone());
                    w.insert(t.clone());
                }
            }
            if !w.is_empty() {
                acc.fail(g, i, Facet::ValueCompleteness, w);
            }
        }
        let missing: Vec<Id> = r
            .required_parts
            .iter()
            .filter(|p| !cx.holders(p).contains(a))
            .cloned()
            .collect();
        if !missing.is_empty() {
            acc.fail(g, i, Facet::PurposeCompleteness, missing);
        }
        read_timeliness(&cx, r, &mut acc);
    }
    send_timeliness(&cx, &mut acc);
    consistency(&cx, &mut acc);
    let mut out: BTreeMap<(Id, Id, Dimension), IqVerdict> = BTreeMap::new();
    for (g, i, d) in acc.applies {
        let (failed, witness) = acc.fails.remove(&(g.clone(), i.clone(), d)).unwrap_or_default();
        out.insert(
            (g.clone(), i.clone(), d),
            IqVerdict {
                goal: g,
                info: i,
                dimension: d,
                satisfied: failed.is_empty(),
                failed: failed.into_iter().collect(),
                witness: witness.into_iter().collect(),
            },
        );
    }
    debug_assert!(acc.fails.is_empty(), "failure recorded for a non-applicable triple");
    Ok(out.into_values().collect())
}

fn usages(m: &GoalModel) -> BTreeSet<(Id, Id, Operation)> {
    let mut u = BTreeSet::new();
    for p in m.produces.values() {
        u.insert((p.goal.clone(), p.info.clone(), Operation::Produce));
    }
    for r in m.reads.values() {
        u.insert((r.goal.clone(), r.info.clone(), Operation::Read));
    }
    for r in m.modifies.values() {
        u.insert((r.goal.clone(), r.info.clone(), Operation::Modify));
    }
    for s in m.sends.values() {
        u.insert((s.goal.clone(), s.info.clone(), Operation::Send));
    }
    u
}

fn accessibility(cx: &Ctx, acc: &mut Acc) {
    for (g, i, op) in usages(cx.m) {
        acc.applies(&g, &i, Dimension::Accessibility);
        let a = cx.res(&g).to_string();
        if op != Operation::Produce && !cx.holders(&i).contains(&a) {
            acc.fail(&g, &i, Facet::Availability, [a.clone()]);
        }
        if !cx.perms.holds(&a, &i, op) {
            acc.fail(&g, &i, Facet::Permission, [a]);
        }
    }
}

/// Per information item, the actors performing an event they are not entitled to.
fn unauthorised_actors(cx: &Ctx) -> BTreeMap<Id, BTreeSet<Id>> {
    let mut out: BTreeMap<Id, BTreeSet<Id>> = BTreeMap::new();
    let mut check = |actor: &str, info: &str, op: Operation| {
        if !cx.perms.holds(actor, info, op) {
            out.entry(info.to_string()).or_default().insert(actor.to_string());
        }
    };
    for p in cx.m.produces.values() {
        check(cx.res(&p.goal), &p.info, Operation::Produce);
    }
    for r in cx.m.modifies.values() {
        check(cx.res(&r.goal), &r.info, Operation::Modify);
    }
    for s in cx.m.sends.values() {
        check(cx.res(&s.goal), &s.info, Operation::Send);
    }
    for p in cx.m.provisions.values() {
        check(&p.source, &p.info, Operation::Send);
    }
    out
}

fn production_ticks<'a>(m: &'a GoalModel, info: &'a str) -> impl Iterator<Item = Tick> + 'a {
    m.produces.values().filter(move |p| p.info == info).map(|p| p.produced_at)
}

fn timestamps(cx: &Ctx) -> Result<(), IqError> {
    let mut bad = BTreeSet::new();
    for r in cx.m.reads.values() {
        let mut ticks = production_ticks(cx.m, &r.info).peekable();
        if ticks.peek().is_some() && ticks.all(|t| t > r.read_at) {
            bad.insert((r.goal.clone(), r.info.clone()));
        }
        for s in cx.m.sends.values() {
            if s.info == r.info && s.destination == cx.res(&r.goal) && r.read_at < s.sent_at {
                bad.insert((r.goal.clone(), r.info.clone()));
            }
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(IqError::InconsistentTimestamps(bad.into_iter().collect()))
    }
}

fn read_timeliness(cx: &Ctx, r: &ReadRel, acc: &mut Acc) {
    let Some(latest) = production_ticks(cx.m, &r.info).filter(|t| *t <= r.read_at).max() else {
        return;
    };
    acc.applies(&r.goal, &r.info, Dimension::Timeliness);
    let volatility = cx.m.information[&r.info].volatility;
    if r.read_at >= latest + volatility {
        acc.fail(&r.goal, &r.info, Facet::ReadTimeliness, [r.goal.clone()]);
    }
}

fn send_timeliness(cx: &Ctx, acc: &mut Acc) {
    for s in cx.m.sends.values() {
        for r in cx.m.reads.values() {
            if r.info != s.info || cx.res(&r.goal) != s.destination {
                continue;
            }
            acc.applies(&s.goal, &s.info, Dimension::Timeliness);
            if r.read_at >= s.sent_at + s.timeliness {
                acc.fail(&s.goal, &s.info, Facet::SendTimeliness, [r.goal.clone()]);
            }
        }
    }
}

fn consistency(cx: &Ctx, acc: &mut Acc) {
    let mut groups: BTreeMap<(&str, &str), Vec<&ReadRel>> = BTreeMap::new();
    for r in cx.m.reads.values() {
        groups.entry((r.info.as_str(), r.purpose.trim())).or_default().push(r);
    }
    for ((info, _), readers) in groups {
        let actors: BTreeSet<&str> = readers.iter().map(|r| cx.res(&r.goal)).collect();
        let times: BTreeSet<Tick> = readers.iter().map(|r| r.read_at).collect();
        if actors.len() < 2 || times.len() < 2 {
            continue;
        }
        let goals: Vec<Id> = readers.iter().map(|r| r.goal.clone()).collect();
        for r in &readers {
            acc.fail(&r.goal, info, Facet::ReaderConsistency, goals.clone());
        }
    }
}
