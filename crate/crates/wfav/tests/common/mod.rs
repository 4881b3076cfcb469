//! Oracles and generators shared by the integration tests. Nothing here
//! calls the library's evaluators or explorers: each oracle is a deliberately
//! naive re-derivation used only for comparison.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use wfav::datalog::{Atom, Fact, Literal, Program, Rule, Term, Value};
use wfav::mapper::{identify_blocks, map_to_net};
use wfav::model::{Decomposition, DecompositionKind, GoalModel};
use wfav::parser::{parse_goal_model, parse_wfa_net};
use wfav::wfa::{NodeKind, Transition, WfaNet};

pub fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn read(rel: &str) -> String {
    std::fs::read_to_string(fixture(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn model(rel: &str) -> GoalModel {
    parse_goal_model(&read(rel), rel).unwrap_or_else(|d| panic!("{rel}: {d:?}")).value
}

pub fn net(rel: &str) -> WfaNet {
    parse_wfa_net(&read(rel), rel).unwrap_or_else(|d| panic!("{rel}: {d:?}")).value
}

/// Fixture files with `ext`, relative to the fixture root, sorted.
pub fn corpus(ext: &str) -> Vec<String> {
    let mut out = Vec::new();
    for dir in ["", "mutants"] {
        let Ok(entries) = std::fs::read_dir(fixture(dir)) else { continue };
        for e in entries.flatten() {
            let name = e.file_name().to_string_lossy().to_string();
            if name.ends_with(ext) {
                out.push(if dir.is_empty() { name } else { format!("{dir}/{name}") });
            }
        }
    }
    out.sort();
    out
}

// ---------------------------------------------------------------------------
// Datalog: naive fixpoint with an independent stratifier

type Rel = BTreeMap<Arc<str>, BTreeSet<Vec<Value>>>;

/// Level of every predicate by relaxation: a positive edge keeps the level,
/// a negative edge raises it by one. `None` when levels keep growing.
pub fn naive_levels(p: &Program) -> Option<BTreeMap<Arc<str>, usize>> {
    let mut level: BTreeMap<Arc<str>, usize> = BTreeMap::new();
    for r in &p.rules {
        level.entry(r.head.pred.clone()).or_insert(0);
        for l in &r.body {
            if let Literal::Atom { atom, .. } = l {
                level.entry(atom.pred.clone()).or_insert(0);
            }
        }
    }
    let n = level.len();
    loop {
        let mut changed = false;
        for r in &p.rules {
            for l in &r.body {
                if let Literal::Atom { atom, negated } = l {
                    let need = level[&atom.pred] + usize::from(*negated);
                    if level[&r.head.pred] < need {
                        level.insert(r.head.pred.clone(), need);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return Some(level);
        }
        if level.values().any(|l| *l > n) {
            return None;
        }
    }
}

fn resolve(t: &Term, s: &BTreeMap<Arc<str>, Value>) -> Option<Value> {
    match t {
        Term::Const(v) => Some(v.clone()),
        Term::Var(x) => s.get(x).cloned(),
    }
}

fn matches(atom: &Atom, tuple: &[Value], s: &BTreeMap<Arc<str>, Value>) -> Option<BTreeMap<Arc<str>, Value>> {
    if atom.terms.len() != tuple.len() {
        return None;
    }
    let mut s = s.clone();
    for (t, v) in atom.terms.iter().zip(tuple) {
        match t {
            Term::Const(c) if c != v => return None,
            Term::Const(_) => {}
            Term::Var(x) => match s.get(x) {
                Some(b) if b != v => return None,
                Some(_) => {}
                None => {
                    s.insert(x.clone(), v.clone());
                }
            },
        }
    }
    Some(s)
}

fn derive(rule: &Rule, db: &Rel) -> Vec<Vec<Value>> {
    let positives: Vec<&Atom> = rule
        .body
        .iter()
        .filter_map(|l| match l {
            Literal::Atom { atom, negated: false } => Some(atom),
            _ => None,
        })
        .collect();
    let mut subs = vec![BTreeMap::new()];
    for a in positives {
        let empty = BTreeSet::new();
        let rel = db.get(&a.pred).unwrap_or(&empty);
        subs = subs.iter().flat_map(|s| rel.iter().filter_map(|t| matches(a, t, s))).collect();
    }
    subs.into_iter()
        .filter(|s| {
            rule.body.iter().all(|l| match l {
                Literal::Atom { negated: false, .. } => true,
                Literal::Atom { atom, negated: true } => {
                    let t: Vec<Value> = atom.terms.iter().map(|x| resolve(x, s).unwrap()).collect();
                    !db.get(&atom.pred).is_some_and(|r| r.contains(&t))
                }
                Literal::Cmp { op, lhs, rhs, negated } => {
                    op.holds(&resolve(lhs, s).unwrap(), &resolve(rhs, s).unwrap()) != *negated
                }
            })
        })
        .map(|s| rule.head.terms.iter().map(|t| resolve(t, &s).unwrap()).collect())
        .collect()
}

/// Every fact of the perfect model, by naive iteration stratum by stratum.
pub fn naive_eval(p: &Program) -> BTreeSet<Fact> {
    let levels = naive_levels(p).expect("stratifiable");
    let mut db: Rel = BTreeMap::new();
    for f in &p.edb {
        db.entry(f.pred.clone()).or_default().insert(f.args.clone());
    }
    let top = levels.values().copied().max().unwrap_or(0);
    for l in 0..=top {
        let rules: Vec<&Rule> = p.rules.iter().filter(|r| levels[&r.head.pred] == l).collect();
        loop {
            let mut new = Vec::new();
            for r in &rules {
                for t in derive(r, &db) {
                    if !db.get(&r.head.pred).is_some_and(|x| x.contains(&t)) {
                        new.push((r.head.pred.clone(), t));
                    }
                }
            }
            if new.is_empty() {
                break;
            }
            for (p, t) in new {
                db.entry(p).or_default().insert(t);
            }
        }
    }
    db.into_iter()
        .flat_map(|(p, ts)| ts.into_iter().map(move |t| Fact { pred: p.clone(), args: t }))
        .collect()
}

/// A random range-restricted program over at most six predicates. Positive
/// atoms point at the head or earlier predicates and negation strictly
/// earlier, so every program stratifies.
pub fn random_program(rng: &mut impl Rng) -> Program {
    let consts: Vec<Value> = ["a", "b", "c", "d"].iter().map(|s| Value::sym(s)).chain([Value::Int(1), Value::Int(2)]).collect();
    let n_edb = rng.gen_range(1..=2);
    let n_idb = rng.gen_range(1..=6 - n_edb);
    let mut preds: Vec<(String, usize)> = Vec::new();
    for i in 0..n_edb {
        preds.push((format!("e{i}"), rng.gen_range(1..=2)));
    }
    for i in 0..n_idb {
        preds.push((format!("p{i}"), rng.gen_range(1..=2)));
    }
    let mut p = Program::new();
    let n_facts = rng.gen_range(0..=30);
    for _ in 0..n_facts {
        let (name, ar) = &preds[rng.gen_range(0..n_edb)];
        let args = (0..*ar).map(|_| consts.choose(rng).unwrap().clone()).collect();
        p.add_fact(Fact::new(name, args));
    }
    let vars = ["X", "Y", "Z"];
    for h in 0..n_idb {
        let head_idx = n_edb + h;
        for _ in 0..rng.gen_range(1..=3) {
            let mut body = Vec::new();
            let mut bound: BTreeSet<&str> = BTreeSet::new();
            for _ in 0..rng.gen_range(1..=3) {
                let (name, ar) = &preds[rng.gen_range(0..=head_idx)];
                let terms: Vec<Term> = (0..*ar)
                    .map(|_| {
                        if rng.gen_bool(0.85) {
                            let v = vars.choose(rng).unwrap();
                            bound.insert(v);
                            Term::var(v)
                        } else {
                            Term::Const(consts.choose(rng).unwrap().clone())
                        }
                    })
                    .collect();
                body.push(Literal::pos(Atom::new(name, terms)));
            }
            let bound: Vec<&str> = bound.into_iter().collect();
            if bound.is_empty() {
                continue;
            }
            if rng.gen_bool(0.4) {
                let (name, ar) = &preds[rng.gen_range(0..head_idx)];
                let terms = (0..*ar).map(|_| Term::var(bound.choose(rng).unwrap())).collect();
                body.push(Literal::neg(Atom::new(name, terms)));
            }
            if rng.gen_bool(0.2) {
                let op = *[wfav::datalog::Builtin::Lt, wfav::datalog::Builtin::Le, wfav::datalog::Builtin::Eq].choose(rng).unwrap();
                body.push(Literal::Cmp {
                    op,
                    lhs: Term::var(bound.choose(rng).unwrap()),
                    rhs: Term::var(bound.choose(rng).unwrap()),
                    negated: rng.gen_bool(0.5),
                });
            }
            let (name, ar) = &preds[head_idx];
            let head = Atom::new(name, (0..*ar).map(|_| Term::var(bound.choose(rng).unwrap())).collect());
            p.add_rule(Rule { head, body });
        }
    }
    p
}

// ---------------------------------------------------------------------------
// Nets: naive exhaustive oracle

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleVerdict {
    pub option_to_complete: bool,
    pub proper_completion: bool,
    pub dead: BTreeSet<String>,
    /// Some place exceeded the bound.
    pub exceeded: bool,
}

struct OTrans {
    id: String,
    ins: Vec<String>,
    outs: Vec<String>,
    info: Option<Transition>,
}

type OState = (BTreeMap<String, u32>, BTreeSet<(String, String)>);

fn oracle_transitions(n: &WfaNet) -> Vec<OTrans> {
    let mut ts: BTreeMap<String, OTrans> = n
        .transitions
        .values()
        .map(|t| (t.id.clone(), OTrans { id: t.id.clone(), ins: vec![], outs: vec![], info: Some(t.clone()) }))
        .collect();
    for (a, b) in &n.arcs {
        let bridge = format!("{a}>{b}");
        match (n.node_kind(a), n.node_kind(b)) {
            (Some(NodeKind::Place), Some(NodeKind::Transition)) => ts.get_mut(b).unwrap().ins.push(a.clone()),
            (Some(NodeKind::Transition), Some(NodeKind::Place)) => ts.get_mut(a).unwrap().outs.push(b.clone()),
            (Some(NodeKind::Transition), Some(NodeKind::Transition)) => {
                ts.get_mut(a).unwrap().outs.push(bridge.clone());
                ts.get_mut(b).unwrap().ins.push(bridge);
            }
            (Some(NodeKind::Place), Some(NodeKind::Place)) => {
                ts.insert(bridge.clone(), OTrans { id: bridge, ins: vec![a.clone()], outs: vec![b.clone()], info: None });
            }
            _ => {}
        }
    }
    ts.into_values().collect()
}

fn ofire(t: &OTrans, s: &OState, info_flow: bool) -> Option<OState> {
    if t.ins.is_empty() || t.ins.iter().any(|p| s.0.get(p).copied().unwrap_or(0) == 0) {
        return None;
    }
    let mut info = s.1.clone();
    if let Some(tr) = &t.info {
        if info_flow {
            let need = tr.rd.iter().chain(&tr.md).chain(tr.sd.iter().map(|(i, _)| i).filter(|i| !tr.pd.contains(*i)));
            for i in need {
                if !s.1.contains(&(i.clone(), tr.res.clone())) {
                    return None;
                }
            }
        }
        info.extend(tr.pd.iter().map(|i| (i.clone(), tr.res.clone())));
        info.extend(tr.sd.iter().cloned());
    }
    let mut m = s.0.clone();
    for p in &t.ins {
        *m.get_mut(p).unwrap() -= 1;
    }
    for p in &t.outs {
        *m.entry(p.clone()).or_insert(0) += 1;
    }
    m.retain(|_, k| *k > 0);
    Some((m, info))
}

/// Reachable states by exhausting every firing sequence; each state is
/// expanded once, which is where the enumeration closes.
pub fn soundness_oracle(n: &WfaNet, info_flow: bool, bound: u32) -> OracleVerdict {
    let ts = oracle_transitions(n);
    let init: OState = (BTreeMap::from([(n.initial.clone(), 1)]), BTreeSet::new());
    let mut seen: BTreeSet<OState> = BTreeSet::new();
    let mut succ: BTreeMap<OState, Vec<OState>> = BTreeMap::new();
    let mut fired: BTreeSet<String> = BTreeSet::new();
    let mut stack = vec![init.clone()];
    while let Some(s) = stack.pop() {
        if !seen.insert(s.clone()) {
            continue;
        }
        if s.0.values().any(|k| *k > bound) {
            return OracleVerdict { option_to_complete: false, proper_completion: false, dead: BTreeSet::new(), exceeded: true };
        }
        let mut next = Vec::new();
        for t in &ts {
            if let Some(x) = ofire(t, &s, info_flow) {
                fired.insert(t.id.clone());
                next.push(x.clone());
                stack.push(x);
            }
        }
        succ.insert(s, next);
    }
    let is_final = |s: &OState| s.0.len() == 1 && s.0.get(&n.final_place) == Some(&1);
    let can_finish = |from: &OState| {
        let mut seen = BTreeSet::new();
        let mut stack = vec![from.clone()];
        while let Some(s) = stack.pop() {
            if is_final(&s) {
                return true;
            }
            if seen.insert(s.clone()) {
                stack.extend(succ[&s].iter().cloned());
            }
        }
        false
    };
    OracleVerdict {
        option_to_complete: seen.iter().all(can_finish),
        proper_completion: !seen.iter().any(|s| s.0.get(&n.final_place).copied().unwrap_or(0) >= 1 && s.0.values().sum::<u32>() > 1),
        dead: ts.iter().map(|t| t.id.clone()).filter(|t| !fired.contains(t)).collect(),
        exceeded: false,
    }
}

/// A random bipartite net with at most `max_places` places; every
/// transition gets at least one input and one output.
pub fn random_net(rng: &mut impl Rng, max_places: usize) -> WfaNet {
    let np = rng.gen_range(2..=max_places);
    let nt = rng.gen_range(1..=5);
    let places: Vec<String> = (0..np).map(|i| format!("p{i}")).collect();
    let mut n = WfaNet::new("p0", format!("p{}", np - 1));
    for p in &places {
        n.add_place(p.clone());
    }
    let infos = ["I", "J"];
    let actors = ["A", "B"];
    for i in 0..nt {
        let mut t = Transition::new(format!("t{i}"), *actors.choose(rng).unwrap());
        if rng.gen_bool(0.3) {
            t.pd.insert(infos.choose(rng).unwrap().to_string());
        }
        if rng.gen_bool(0.3) {
            t.rd.insert(infos.choose(rng).unwrap().to_string());
        }
        if rng.gen_bool(0.15) {
            t.sd.insert((infos.choose(rng).unwrap().to_string(), actors.choose(rng).unwrap().to_string()));
        }
        let id = t.id.clone();
        n.add_transition(t);
        for _ in 0..rng.gen_range(1..=2) {
            n.add_arc(places.choose(rng).unwrap().clone(), id.clone());
        }
        for _ in 0..rng.gen_range(1..=2) {
            n.add_arc(id.clone(), places.choose(rng).unwrap().clone());
        }
    }
    n
}

// ---------------------------------------------------------------------------
// Goal trees

/// A random valid decomposition tree of depth at most `depth` with fan-out
/// 2..=3. Some leaves produce information that later leaves read, so the
/// mapper has to reorder And-blocks.
pub fn random_tree_model(rng: &mut impl Rng, depth: usize) -> GoalModel {
    let mut text = String::from("actor A kind=agent\n");
    let mut goals = Vec::new();
    let mut decomps = Vec::new();
    let mut counter = 0usize;
    fn grow(
        rng: &mut impl Rng,
        depth: usize,
        counter: &mut usize,
        goals: &mut Vec<String>,
        decomps: &mut Vec<String>,
        leaves: &mut Vec<String>,
    ) -> String {
        *counter += 1;
        let id = format!("G{counter}");
        goals.push(id.clone());
        if depth > 0 && rng.gen_bool(0.6) {
            let kind = if rng.gen_bool(0.5) { "and" } else { "or" };
            let k = rng.gen_range(2..=3);
            let kids: Vec<String> = (0..k).map(|_| grow(rng, depth - 1, counter, goals, decomps, leaves)).collect();
            decomps.push(format!("decompose {id} {kind} {}", kids.join(" ")));
        } else {
            leaves.push(id.clone());
        }
        id
    }
    let mut leaves = Vec::new();
    grow(rng, depth, &mut counter, &mut goals, &mut decomps, &mut leaves);
    let mut rels = Vec::new();
    let mut produced: Vec<String> = Vec::new();
    let mut infos = Vec::new();
    for l in &leaves {
        // reads only point at earlier leaves, which keeps dependencies acyclic
        let mut touched = false;
        if !produced.is_empty() && rng.gen_bool(0.3) {
            let i = produced.choose(rng).unwrap();
            rels.push(format!("read {l} {i} type=R check=B purpose=\"p\" at=5"));
            touched = true;
        }
        if rng.gen_bool(0.4) {
            let i = format!("I_{l}");
            rels.push(format!("produce {l} {i} check=B at=0"));
            infos.push(i.clone());
            produced.push(i);
            touched = true;
        }
        let flag = if touched { "" } else { " atomic-no-info" };
        text.push_str(&format!("goal {l} \"leaf\" actor=A{flag}\n"));
    }
    for i in &infos {
        text.push_str(&format!("info {i} volatility=10 owner=A\n"));
    }
    for g in &goals {
        if !leaves.contains(g) {
            text.push_str(&format!("goal {g} \"node\" actor=A\n"));
        }
    }
    for d in decomps {
        text.push_str(&d);
        text.push('\n');
    }
    for r in rels {
        text.push_str(&r);
        text.push('\n');
    }
    parse_goal_model(&text, "random").unwrap_or_else(|d| panic!("{d:?}\n{text}")).value
}

/// Complete runs of the tree: And multiplies, Or adds.
pub fn tree_runs(m: &GoalModel, g: &str) -> u64 {
    match m.decompositions.get(g) {
        None => 1,
        Some(Decomposition { kind: DecompositionKind::And, children, .. }) => children.iter().map(|c| tree_runs(m, c)).product(),
        Some(Decomposition { kind: DecompositionKind::Or, children, .. }) => children.iter().map(|c| tree_runs(m, c)).sum(),
    }
}

/// Firing sequences from the initial to the final marking, counted by
/// brute force. Only meaningful for acyclic nets.
pub fn count_runs(n: &WfaNet) -> u64 {
    let ts = oracle_transitions(n);
    fn go(ts: &[OTrans], s: &OState, fin: &str) -> u64 {
        if s.0.len() == 1 && s.0.get(fin) == Some(&1) {
            return 1;
        }
        ts.iter().filter_map(|t| ofire(t, s, false)).map(|x| go(ts, &x, fin)).sum()
    }
    go(&ts, &(BTreeMap::from([(n.initial.clone(), 1)]), BTreeSet::new()), &n.final_place)
}

pub fn map_model(m: &GoalModel) -> (WfaNet, wfav::mapper::MappingTrace) {
    let blocks = identify_blocks(m).expect("blocks");
    map_to_net(m, &blocks, &[]).expect("mapping")
}

// ---------------------------------------------------------------------------
// Mutant manifest

pub struct Mutant {
    pub property: wfav::properties::PropertyId,
    pub model: String,
    pub net: Option<String>,
    pub trace: Option<String>,
    pub bound: u32,
    pub also: BTreeSet<wfav::properties::PropertyId>,
}

pub fn mutants() -> Vec<Mutant> {
    let rel = |s: &str| -> String {
        let p = Path::new("mutants").join(s);
        let mut parts: Vec<String> = Vec::new();
        for c in p.components() {
            match c {
                std::path::Component::ParentDir => {
                    parts.pop();
                }
                std::path::Component::Normal(x) => parts.push(x.to_string_lossy().to_string()),
                _ => {}
            }
        }
        parts.join("/")
    };
    read("mutants/manifest.txt")
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let w: Vec<&str> = l.split_whitespace().collect();
            let opt = |s: &str| (s != "-").then(|| rel(s));
            Mutant {
                property: wfav::properties::PropertyId::from_name(w[0]).unwrap(),
                model: rel(w[1]),
                net: opt(w[2]),
                trace: opt(w[3]),
                bound: w[4].parse().unwrap(),
                also: w[5..].iter().map(|s| wfav::properties::PropertyId::from_name(s).unwrap()).collect(),
            }
        })
        .collect()
}
