use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::permissions::PermissionTable;
use super::types::{ActorKind, DelegationSubject, GoalModel, Id, TrustScope};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StructuralErrorKind {
    DanglingReference,
    RolePlaysRole,
    PlaysNonRole,
    DecompositionArity,
    DuplicateChild,
    ChildOfMultiple,
    DecompositionCycle,
    PartOfCycle,
    RequiredPartOutsideInfo,
    NonPositiveDuration,
    ProvisionSelfLoop,
    AmbiguousDelegation,
    DelegationCycle,
    GrantNotRooted,
    TrustConflict,
    LeafWithoutInformation,
}

/// A violated model invariant together with the offending element ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StructuralError {
    pub kind: StructuralErrorKind,
    pub elements: Vec<Id>,
    pub message: String,
}

impl fmt::Display for StructuralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.message, self.elements.join(","))
    }
}

struct Collector {
    errors: Vec<StructuralError>,
}

impl Collector {
    fn push(&mut self, kind: StructuralErrorKind, elements: Vec<Id>, message: impl Into<String>) {
        self.errors.push(StructuralError {
            kind,
            elements,
            message: message.into(),
        });
    }

    fn actor(&mut self, m: &GoalModel, id: &str, ctx: &str) {
        if !m.actors.contains_key(id) {
            self.push(
                StructuralErrorKind::DanglingReference,
                vec![id.to_string()],
                format!("unknown actor {id} in {ctx}"),
            );
        }
    }

    fn goal(&mut self, m: &GoalModel, id: &str, ctx: &str) {
        if !m.goals.contains_key(id) {
            self.push(
                StructuralErrorKind::DanglingReference,
                vec![id.to_string()],
                format!("unknown goal {id} in {ctx}"),
            );
        }
    }

    fn info(&mut self, m: &GoalModel, id: &str, ctx: &str) {
        if !m.information.contains_key(id) {
            self.push(
                StructuralErrorKind::DanglingReference,
                vec![id.to_string()],
                format!("unknown information {id} in {ctx}"),
            );
        }
    }
}

/// Checks every model invariant. An empty result means the model is valid.
///
/// The result is sorted, so repeated calls on the same model are identical.
pub fn validate_model(m: &GoalModel) -> Vec<StructuralError> {
    let mut c = Collector { errors: Vec::new() };

    for a in m.actors.values() {
        if a.kind == ActorKind::Role && !a.plays.is_empty() {
            c.push(
                StructuralErrorKind::RolePlaysRole,
                vec![a.id.clone()],
                "only agents may play roles",
            );
        }
        for r in &a.plays {
            match m.actors.get(r) {
                None => c.actor(m, r, &format!("plays of {}", a.id)),
                Some(role) if role.kind != ActorKind::Role => c.push(
                    StructuralErrorKind::PlaysNonRole,
                    vec![a.id.clone(), r.clone()],
                    format!("{} plays {} which is not a role", a.id, r),
                ),
                Some(_) => {}
            }
        }
    }

    for g in m.goals.values() {
        c.actor(m, &g.actor, &format!("goal {}", g.id));
    }

    check_decompositions(m, &mut c);

    for i in m.information.values() {
        c.actor(m, &i.owner, &format!("owner of {}", i.id));
        for p in &i.parts {
            c.info(m, p, &format!("parts of {}", i.id));
        }
    }
    check_part_of(m, &mut c);

    for p in m.produces.values() {
        c.goal(m, &p.goal, "produce");
        c.info(m, &p.info, "produce");
    }
    for r in m.reads.values() {
        c.goal(m, &r.goal, "read");
        c.info(m, &r.info, "read");
        if m.information.contains_key(&r.info) {
            let allowed = m.parts_closure(&r.info);
            for p in &r.required_parts {
                if !allowed.contains(p) {
                    c.push(
                        StructuralErrorKind::RequiredPartOutsideInfo,
                        vec![r.goal.clone(), r.info.clone(), p.clone()],
                        format!("required part {p} is not part of {}", r.info),
                    );
                }
            }
        }
    }
    for r in m.modifies.values() {
        c.goal(m, &r.goal, "modify");
        c.info(m, &r.info, "modify");
    }
    for s in m.sends.values() {
        c.goal(m, &s.goal, "send");
        c.info(m, &s.info, "send");
        c.actor(m, &s.destination, "send destination");
        if s.timeliness == 0 {
            c.push(
                StructuralErrorKind::NonPositiveDuration,
                vec![s.goal.clone(), s.info.clone()],
                "send timeliness must be positive",
            );
        }
    }
    for p in m.provisions.values() {
        c.actor(m, &p.source, "provision");
        c.actor(m, &p.target, "provision");
        c.info(m, &p.info, "provision");
        if p.source == p.target {
            c.push(
                StructuralErrorKind::ProvisionSelfLoop,
                vec![p.source.clone(), p.info.clone()],
                "provision source equals target",
            );
        }
        if p.transmission_time == 0 {
            c.push(
                StructuralErrorKind::NonPositiveDuration,
                vec![p.source.clone(), p.target.clone(), p.info.clone()],
                "transmission time must be positive",
            );
        }
    }
    for g in m.permissions.values() {
        c.actor(m, &g.grantor, &format!("grant {}", g.id));
        c.actor(m, &g.grantee, &format!("grant {}", g.id));
        c.info(m, &g.info, &format!("grant {}", g.id));
    }
    check_delegations(m, &mut c);
    check_grants(m, &mut c);
    check_trust(m, &mut c);

    for g in m.leaf_goals() {
        let goal = &m.goals[&g];
        if !goal.atomic_no_info && !m.has_info_relation(&g) {
            c.push(
                StructuralErrorKind::LeafWithoutInformation,
                vec![g.clone()],
                format!("leaf goal {g} has no information relation and is not marked atomic-no-info"),
            );
        }
    }

    let mut errors = c.errors;
    errors.sort();
    errors.dedup();
    errors
}

fn check_decompositions(m: &GoalModel, c: &mut Collector) {
    let mut child_of: BTreeMap<&Id, Vec<&Id>> = BTreeMap::new();
    for d in m.decompositions.values() {
        c.goal(m, &d.parent, "decompose");
        if d.children.len() < 2 {
            c.push(
                StructuralErrorKind::DecompositionArity,
                vec![d.parent.clone()],
                "decomposition arity < 2",
            );
        }
        let mut seen = BTreeSet::new();
        for ch in &d.children {
            c.goal(m, ch, &format!("decomposition of {}", d.parent));
            if !seen.insert(ch) {
                c.push(
                    StructuralErrorKind::DuplicateChild,
                    vec![d.parent.clone(), ch.clone()],
                    format!("{ch} listed twice in decomposition of {}", d.parent),
                );
            } else {
                child_of.entry(ch).or_default().push(&d.parent);
            }
        }
    }
    for (child, parents) in &child_of {
        if parents.len() > 1 {
            let mut elements = vec![(*child).clone()];
            elements.extend(parents.iter().map(|p| (*p).clone()));
            c.push(
                StructuralErrorKind::ChildOfMultiple,
                elements,
                format!("{child} is a child of more than one decomposition"),
            );
        }
    }
    let edges: BTreeMap<&Id, Vec<&Id>> = m
        .decompositions
        .values()
        .map(|d| (&d.parent, d.children.iter().collect()))
        .collect();
    for cycle in find_cycles(&edges) {
        c.push(
            StructuralErrorKind::DecompositionCycle,
            cycle.clone(),
            format!("decomposition cycle {{{}}}", cycle.join(",")),
        );
    }
}

fn check_part_of(m: &GoalModel, c: &mut Collector) {
    let edges: BTreeMap<&Id, Vec<&Id>> = m
        .information
        .values()
        .map(|i| (&i.id, i.parts.iter().collect()))
        .collect();
    for cycle in find_cycles(&edges) {
        c.push(
            StructuralErrorKind::PartOfCycle,
            cycle.clone(),
            format!("part-of cycle {{{}}}", cycle.join(",")),
        );
    }
}

/// Strongly connected components with a cycle, each sorted.
fn find_cycles(edges: &BTreeMap<&Id, Vec<&Id>>) -> Vec<Vec<Id>> {
    let mut g = petgraph::graph::DiGraph::<Id, ()>::new();
    let mut idx = BTreeMap::new();
    let mut node = |g: &mut petgraph::graph::DiGraph<Id, ()>, id: &Id| {
        *idx.entry(id.clone()).or_insert_with(|| g.add_node(id.clone()))
    };
    let mut pairs = Vec::new();
    for (from, tos) in edges {
        let f = node(&mut g, from);
        for to in tos {
            let t = node(&mut g, to);
            pairs.push((f, t));
        }
    }
    for (f, t) in pairs {
        g.add_edge(f, t, ());
    }
    let mut out = Vec::new();
    for scc in petgraph::algo::tarjan_scc(&g) {
        let cyclic = scc.len() > 1 || g.contains_edge(scc[0], scc[0]);
        if cyclic {
            let mut ids: Vec<Id> = scc.iter().map(|n| g[*n].clone()).collect();
            ids.sort();
            out.push(ids);
        }
    }
    out.sort();
    out
}

fn check_delegations(m: &GoalModel, c: &mut Collector) {
    let mut by_subject: BTreeMap<&DelegationSubject, BTreeMap<&Id, Vec<&Id>>> = BTreeMap::new();
    for d in &m.delegations {
        c.actor(m, &d.delegator, "delegation");
        c.actor(m, &d.delegatee, "delegation");
        match &d.subject {
            DelegationSubject::Goal(g) => c.goal(m, g, "delegation"),
            DelegationSubject::Permission(p) => {
                if !m.permissions.contains_key(p) {
                    c.push(
                        StructuralErrorKind::DanglingReference,
                        vec![p.clone()],
                        format!("unknown permission grant {p} in delegation"),
                    );
                }
            }
        }
        by_subject
            .entry(&d.subject)
            .or_default()
            .entry(&d.delegator)
            .or_default()
            .push(&d.delegatee);
    }
    for (subject, edges) in &by_subject {
        if let DelegationSubject::Goal(g) = subject {
            for (from, tos) in edges {
                if tos.len() > 1 {
                    let mut elements = vec![g.clone(), (*from).clone()];
                    elements.extend(tos.iter().map(|t| (*t).clone()));
                    c.push(
                        StructuralErrorKind::AmbiguousDelegation,
                        elements,
                        format!("{from} delegates goal {g} more than once"),
                    );
                }
            }
        }
        for cycle in find_cycles(edges) {
            let mut elements = vec![subject.id().to_string()];
            elements.extend(cycle.iter().cloned());
            c.push(
                StructuralErrorKind::DelegationCycle,
                elements,
                format!(
                    "delegation cycle for {} over {{{}}}",
                    subject.id(),
                    cycle.join(",")
                ),
            );
        }
    }
}

fn check_grants(m: &GoalModel, c: &mut Collector) {
    let table = PermissionTable::compute(m);
    for g in m.permissions.values() {
        if !m.information.contains_key(&g.info) {
            continue;
        }
        let missing: Vec<_> = g
            .ops
            .iter()
            .filter(|op| !table.holds(&g.grantor, &g.info, **op))
            .collect();
        if !missing.is_empty() {
            c.push(
                StructuralErrorKind::GrantNotRooted,
                vec![g.id.clone(), g.grantor.clone(), g.info.clone()],
                format!(
                    "grant {} is not rooted at the owner of {}: {} does not hold {}",
                    g.id,
                    g.info,
                    g.grantor,
                    missing
                        .iter()
                        .map(|o| o.name())
                        .collect::<Vec<_>>()
                        .join(",")
                ),
            );
        }
    }
}

fn check_trust(m: &GoalModel, c: &mut Collector) {
    let mut seen: BTreeMap<(&Id, &Id, &TrustScope), BTreeSet<_>> = BTreeMap::new();
    for t in &m.trust {
        c.actor(m, &t.trustor, "trust");
        c.actor(m, &t.trustee, "trust");
        match &t.scope {
            TrustScope::Goal(g) => c.goal(m, g, "trust"),
            TrustScope::ProducedInfo(i) => c.info(m, i, "trust"),
            TrustScope::Permission(p) => {
                if !m.permissions.contains_key(p) {
                    c.push(
                        StructuralErrorKind::DanglingReference,
                        vec![p.clone()],
                        format!("unknown permission grant {p} in trust"),
                    );
                }
            }
        }
        seen.entry((&t.trustor, &t.trustee, &t.scope))
            .or_default()
            .insert(t.polarity);
    }
    for ((trustor, trustee, scope), pols) in seen {
        if pols.len() > 1 {
            let sid = match scope {
                TrustScope::Goal(s) | TrustScope::Permission(s) | TrustScope::ProducedInfo(s) => s,
            };
            c.push(
                StructuralErrorKind::TrustConflict,
                vec![trustor.clone(), trustee.clone(), sid.clone()],
                "both trust and distrust declared for the same scope",
            );
        }
    }
}
