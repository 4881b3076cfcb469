//! Independent audit of a net against the goal model it claims to implement.
//!
//! Nothing here calls the builder: the expected shape is re-derived from the
//! model so that a faulty builder cannot vouch for itself.

use std::collections::{BTreeMap, BTreeSet};

use super::blocks::{identify_blocks, BlockKind, BuildingBlock};
use super::trace::MappingTrace;
use crate::model::{GoalModel, Id};
use crate::properties::{PropertyId, Violation};
use crate::wfa::{ExecNet, WfaNet};

/// Goal -> transition pairs: the trace when given, otherwise every goal `g`
/// whose transition `t_g` exists in the net.
fn pairs(model: &GoalModel, net: &WfaNet, trace: Option<&MappingTrace>) -> BTreeMap<Id, Id> {
    match trace {
        Some(t) => t.pairs.clone(),
        None => model
            .goals
            .keys()
            .map(|g| (g.clone(), format!("t_{g}")))
            .filter(|(_, t)| net.transitions.contains_key(t))
            .collect(),
    }
}

/// Leaf-level data dependencies `(x, y)`: `x` needs an item that `y` makes
/// available to `x`'s responsible actor.
fn dependencies(model: &GoalModel, leaves: &BTreeSet<Id>) -> BTreeSet<(Id, Id)> {
    let res = |g: &str| model.resolve_responsibility(g).unwrap_or_default();
    let mut deps = BTreeSet::new();
    for x in leaves {
        let rx = res(x);
        let own: BTreeSet<&Id> = model.produces.keys().filter(|(g, _)| g == x).map(|(_, i)| i).collect();
        let mut needs: BTreeSet<&Id> = BTreeSet::new();
        needs.extend(model.reads.keys().filter(|(g, _)| g == x).map(|(_, i)| i));
        needs.extend(model.modifies.keys().filter(|(g, _)| g == x).map(|(_, i)| i));
        needs.extend(model.sends.keys().filter(|(g, i, _)| g == x && !own.contains(i)).map(|(_, i, _)| i));
        for y in leaves {
            if x == y {
                continue;
            }
            let supplies = needs.iter().any(|i| {
                (model.produces.contains_key(&(y.clone(), (*i).clone())) && res(y) == rx)
                    || model.sends.contains_key(&(y.clone(), (*i).clone(), rx.clone()))
            });
            if supplies {
                deps.insert((x.clone(), y.clone()));
            }
        }
    }
    deps
}

/// Expected sequence of sibling blocks: repeatedly the first declared block
/// whose suppliers are all placed. Cycles fall back to declared order.
fn expected_order<'a>(blocks: &'a [BuildingBlock], deps: &BTreeSet<(Id, Id)>) -> Vec<&'a BuildingBlock> {
    let needs = |a: &BuildingBlock, b: &BuildingBlock| {
        a.members.iter().any(|x| b.members.iter().any(|y| deps.contains(&(x.clone(), y.clone()))))
    };
    let mut left: Vec<&BuildingBlock> = blocks.iter().collect();
    let mut out = Vec::new();
    while !left.is_empty() {
        let k = (0..left.len())
            .find(|&a| (0..left.len()).all(|b| a == b || !needs(left[a], left[b])))
            .unwrap_or(0);
        out.push(left.remove(k));
    }
    out
}

struct Walk<'a> {
    net: &'a ExecNet,
    pairs: &'a BTreeMap<Id, Id>,
    deps: &'a BTreeSet<(Id, Id)>,
    bound: BTreeMap<usize, usize>,
    next: usize,
    out: Vec<Violation>,
}

impl Walk<'_> {
    fn bind(&mut self, pos: usize, place: usize, t: &str) {
        match self.bound.get(&pos) {
            Some(&p) if p != place => self.out.push(Violation::new(
                PropertyId::M3,
                vec![t.to_string(), self.net.places[place].clone()],
                format!("block boundary is {} here but {} elsewhere", self.net.places[place], self.net.places[p]),
            )),
            Some(_) => {}
            None => {
                self.bound.insert(pos, place);
            }
        }
    }

    fn block(&mut self, b: &BuildingBlock, input: usize, output: usize) {
        if b.members.iter().any(|g| self.pairs.get(g).and_then(|t| self.net.transition(t)).is_none()) {
            return;
        }
        match b.kind {
            BlockKind::Atomic => {
                let t = &self.pairs[&b.root];
                let tr = &self.net.transitions[self.net.transition(t).unwrap()];
                if tr.inputs.len() != 1 || tr.outputs.len() != 1 {
                    self.out.push(Violation::new(
                        PropertyId::M3,
                        vec![b.root.clone(), t.clone()],
                        format!(
                            "leaf transition has {} input and {} output places, expected one each",
                            tr.inputs.len(),
                            tr.outputs.len()
                        ),
                    ));
                    return;
                }
                let (i, o) = (tr.inputs[0], tr.outputs[0]);
                self.bind(input, i, t);
                self.bind(output, o, t);
            }
            BlockKind::OrBlock => {
                for c in &b.children {
                    self.block(c, input, output);
                }
            }
            BlockKind::AndBlock => self.chain(&b.children, input, output),
        }
    }

    fn chain(&mut self, parts: &[BuildingBlock], input: usize, output: usize) {
        let order = expected_order(parts, self.deps);
        let mut from = input;
        for (k, c) in order.iter().enumerate() {
            let to = if k + 1 == order.len() {
                output
            } else {
                self.next += 1;
                self.next
            };
            self.block(c, from, to);
            from = to;
        }
    }
}

/// Mapping properties M1-M5 plus alternation (C2) and dependency order (I4).
pub fn verify_mapping(model: &GoalModel, net: &WfaNet, trace: Option<&MappingTrace>) -> Vec<Violation> {
    use PropertyId::*;
    let mut out = Vec::new();
    let pairs = pairs(model, net, trace);
    let (blocks, scope): (Vec<BuildingBlock>, BTreeSet<Id>) = match identify_blocks(model) {
        Ok(b) => {
            let s = b.iter().flat_map(|x| x.members.iter().cloned()).collect();
            (b, s)
        }
        Err(e) => {
            let super::BlockError::PartialBlock { parent, child } = &e;
            out.push(Violation::new(M3, vec![parent.clone(), child.clone()], e.to_string()));
            let s = model.leaf_goals().into_iter().filter(|g| !model.goals[g].excluded).collect();
            (Vec::new(), s)
        }
    };

    // M1
    for g in &scope {
        match pairs.get(g) {
            None => out.push(Violation::new(M1, vec![g.clone()], "leaf goal has no transition")),
            Some(t) if !net.transitions.contains_key(t) => out.push(Violation::new(
                M1,
                vec![g.clone(), t.clone()],
                "leaf goal maps to a missing transition",
            )),
            _ => {}
        }
    }
    let mut by_transition: BTreeMap<&Id, Vec<Id>> = BTreeMap::new();
    for (g, t) in &pairs {
        by_transition.entry(t).or_default().push(g.clone());
        if !model.goals.contains_key(g) {
            out.push(Violation::new(M1, vec![g.clone(), t.clone()], "mapped goal is not in the model"));
        } else if model.is_leaf(g) && !scope.contains(g) {
            out.push(Violation::new(M1, vec![g.clone(), t.clone()], "goal excluded from mapping has a transition"));
        }
    }
    for (t, gs) in &by_transition {
        if gs.len() > 1 {
            let mut e = gs.clone();
            e.push((*t).clone());
            out.push(Violation::new(M1, e, "several goals share one transition"));
        }
    }
    for t in net.transitions.keys() {
        if !by_transition.contains_key(t) {
            out.push(Violation::new(M1, vec![t.clone()], "transition corresponds to no goal"));
        }
    }

    // M2
    for (g, t) in &pairs {
        if model.decompositions.contains_key(g) {
            out.push(Violation::new(M2, vec![g.clone(), t.clone()], "non-leaf goal mapped to a transition"));
        }
    }

    // M3
    let exec = ExecNet::new(net);
    let deps = dependencies(model, &scope);
    if !blocks.is_empty() && exec.place(&net.initial).is_some() && exec.place(&net.final_place).is_some() {
        let mut w = Walk { net: &exec, pairs: &pairs, deps: &deps, bound: BTreeMap::new(), next: 1, out: Vec::new() };
        w.bound.insert(0, exec.initial);
        w.bound.insert(1, exec.final_place);
        w.chain(&blocks, 0, 1);
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        for (pos, place) in &w.bound {
            if seen.insert(*place, *pos).is_some() {
                w.out.push(Violation::new(
                    M3,
                    vec![exec.places[*place].clone()],
                    "one place joins blocks that must stay apart",
                ));
            }
        }
        out.extend(w.out);
    }

    // M4
    let produced: BTreeSet<&Id> = net.transitions.values().flat_map(|t| t.pd.iter()).collect();
    for t in net.transitions.values() {
        for i in t.mentioned_info() {
            if !produced.contains(i) {
                out.push(Violation::new(M4, vec![t.id.clone(), i.clone()], "information without a producing transition"));
            }
        }
    }

    // M5
    for (g, t) in &pairs {
        let (Some(tr), true) = (net.transitions.get(t), model.goals.contains_key(g)) else { continue };
        match model.resolve_responsibility(g) {
            Ok(r) if r == tr.res => {}
            Ok(r) => out.push(Violation::new(
                M5,
                vec![t.clone(), g.clone()],
                format!("res is {} but the goal is delegated to {r}", tr.res),
            )),
            Err(e) => out.push(Violation::new(M5, vec![t.clone(), g.clone()], e.to_string())),
        }
    }

    // C2
    for issue in net.alternation_issues() {
        let e = match &issue {
            crate::wfa::StructureIssue::ConsecutivePlaces(a, b)
            | crate::wfa::StructureIssue::ConsecutiveTransitions(a, b) => vec![a.clone(), b.clone()],
            _ => continue,
        };
        out.push(Violation::new(C2, e, issue.to_string()));
    }

    // I4
    for (x, y) in &deps {
        let (Some(tx), Some(ty)) = (pairs.get(x), pairs.get(y)) else { continue };
        if net.transitions.contains_key(tx) && net.transitions.contains_key(ty) && net.precedes(tx, ty) {
            out.push(Violation::new(
                I4,
                vec![tx.clone(), ty.clone()],
                format!("{x} needs information from {y} but is sequenced before it"),
            ));
        }
    }

    out.sort();
    out.dedup();
    out
}
