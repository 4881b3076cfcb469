use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::blocks::{BlockError, BlockKind, BuildingBlock};
use super::trace::{model_digest, MappingTrace};
use crate::iq::IqVerdict;
use crate::model::{DelegationCycle, GoalModel, Id};
use crate::wfa::{Transition, WfaNet};

pub const SOURCE: &str = "source";
pub const SINK: &str = "sink";

pub fn transition_id(goal: &str) -> Id {
    format!("t_{goal}")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MappingError {
    #[error(transparent)]
    PartialBlock(#[from] BlockError),
    #[error("goal {goal} uses {info} but no mapped goal produces it")]
    UnproducedInfo { goal: Id, info: Id },
    #[error("cyclic data dependency among {{{}}}", .0.join(","))]
    CyclicDataDependency(Vec<Id>),
    #[error(transparent)]
    Delegation(#[from] DelegationCycle),
}

/// Activity annotation of a leaf goal, copied from its relations.
pub fn leaf_transition(model: &GoalModel, goal: &str) -> Result<Transition, DelegationCycle> {
    let mut t = Transition::new(transition_id(goal), model.resolve_responsibility(goal)?);
    for (g, i) in model.produces.keys() {
        if g == goal {
            t.pd.insert(i.clone());
        }
    }
    for (g, i) in model.reads.keys() {
        if g == goal {
            t.rd.insert(i.clone());
        }
    }
    for (g, i) in model.modifies.keys() {
        if g == goal {
            t.md.insert(i.clone());
        }
    }
    for (g, i, d) in model.sends.keys() {
        if g == goal {
            t.sd.insert((i.clone(), d.clone()));
        }
    }
    Ok(t)
}

/// Leaf `x` depends on leaf `y` when `x` needs an item that `y` puts in the
/// hands of `x`'s responsible actor: by producing it as the same actor, or
/// by sending it there.
fn leaf_dependencies(ts: &BTreeMap<Id, Transition>) -> BTreeSet<(Id, Id)> {
    let mut deps = BTreeSet::new();
    for (x, tx) in ts {
        for i in tx.consumed_info() {
            for (y, ty) in ts {
                if x == y {
                    continue;
                }
                let supplies = (ty.res == tx.res && ty.pd.contains(i))
                    || ty.sd.contains(&(i.clone(), tx.res.clone()));
                if supplies {
                    deps.insert((x.clone(), y.clone()));
                }
            }
        }
    }
    deps
}

/// Stable topological order: among ready blocks the earliest declared wins.
fn order_blocks(
    blocks: Vec<BuildingBlock>,
    deps: &BTreeSet<(Id, Id)>,
) -> Result<Vec<BuildingBlock>, MappingError> {
    let n = blocks.len();
    let needs: Vec<BTreeSet<usize>> = (0..n)
        .map(|a| {
            (0..n)
                .filter(|&b| {
                    a != b
                        && blocks[a].members.iter().any(|x| {
                            blocks[b].members.iter().any(|y| deps.contains(&(x.clone(), y.clone())))
                        })
                })
                .collect()
        })
        .collect();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let next = (0..n).find(|&a| !placed[a] && needs[a].iter().all(|b| placed[*b]));
        match next {
            Some(a) => {
                placed[a] = true;
                order.push(a);
            }
            None => {
                let mut stuck: Vec<Id> =
                    (0..n).filter(|a| !placed[*a]).map(|a| blocks[a].root.clone()).collect();
                stuck.sort();
                return Err(MappingError::CyclicDataDependency(stuck));
            }
        }
    }
    let mut slots: Vec<Option<BuildingBlock>> = blocks.into_iter().map(Some).collect();
    Ok(order.into_iter().map(|i| slots[i].take().unwrap()).collect())
}

fn reorder(block: BuildingBlock, deps: &BTreeSet<(Id, Id)>) -> Result<BuildingBlock, MappingError> {
    let children = block
        .children
        .into_iter()
        .map(|c| reorder(c, deps))
        .collect::<Result<Vec<_>, _>>()?;
    let children = if block.kind == BlockKind::AndBlock { order_blocks(children, deps)? } else { children };
    Ok(if block.kind == BlockKind::Atomic {
        BuildingBlock::atomic(&block.root)
    } else {
        BuildingBlock::composite(&block.root, block.kind, children)
    })
}

struct Builder {
    net: WfaNet,
    next_place: usize,
}

impl Builder {
    fn place(&mut self) -> Id {
        self.next_place += 1;
        let p = format!("p{}", self.next_place);
        self.net.add_place(p.clone());
        p
    }

    fn fragment(&mut self, b: &BuildingBlock, input: &str, output: &str) {
        match b.kind {
            BlockKind::Atomic => {
                let t = transition_id(&b.root);
                self.net.add_arc(input, t.clone());
                self.net.add_arc(t, output);
            }
            BlockKind::OrBlock => {
                for c in &b.children {
                    self.fragment(c, input, output);
                }
            }
            BlockKind::AndBlock => self.chain(&b.children, input, output),
        }
    }

    fn chain(&mut self, parts: &[BuildingBlock], input: &str, output: &str) {
        let mut from = input.to_string();
        for (k, c) in parts.iter().enumerate() {
            let to = if k + 1 == parts.len() { output.to_string() } else { self.place() };
            self.fragment(c, &from, &to);
            from = to;
        }
    }
}

/// Builds the WFA-net of `blocks`.
///
/// Leaves become transitions `t_<goal>`, And-blocks chains through fresh
/// places `p<n>`, Or-blocks alternatives between a shared input and output
/// place. Several root trees are chained in dependency order between
/// `source` and `sink`. Verdicts only feed the IQ gate recorded in the trace.
pub fn map_to_net(
    model: &GoalModel,
    blocks: &[BuildingBlock],
    verdicts: &[IqVerdict],
) -> Result<(WfaNet, MappingTrace), MappingError> {
    let leaves: Vec<&Id> = blocks.iter().flat_map(|b| b.members.iter()).collect();
    let mut ts: BTreeMap<Id, Transition> = BTreeMap::new();
    for g in &leaves {
        ts.insert((*g).clone(), leaf_transition(model, g)?);
    }
    let produced: BTreeSet<&Id> = ts.values().flat_map(|t| t.pd.iter()).collect();
    for (g, t) in &ts {
        if let Some(i) = t.mentioned_info().into_iter().find(|i| !produced.contains(i)) {
            return Err(MappingError::UnproducedInfo { goal: g.clone(), info: i.clone() });
        }
    }
    let deps = leaf_dependencies(&ts);
    let roots = blocks
        .iter()
        .cloned()
        .map(|b| reorder(b, &deps))
        .collect::<Result<Vec<_>, _>>()?;
    let roots = order_blocks(roots, &deps)?;

    let mut b = Builder { net: WfaNet::new(SOURCE, SINK), next_place: 0 };
    if roots.is_empty() {
        b.net = WfaNet::new(SOURCE, SOURCE);
        b.net.add_place(SOURCE);
    } else {
        b.net.add_place(SOURCE);
        b.net.add_place(SINK);
        for t in ts.values() {
            b.net.add_transition(t.clone());
        }
        b.chain(&roots, SOURCE, SINK);
    }

    let mut trace = MappingTrace { model_digest: model_digest(model), blocks: roots, ..Default::default() };
    for g in &leaves {
        let t = transition_id(g);
        let ok = verdicts.iter().filter(|v| v.goal == **g).all(|v| v.satisfied);
        trace.pairs.insert((*g).clone(), t.clone());
        trace.gates.insert(t, ok);
        trace.chains.insert((*g).clone(), model.delegation_chain(g)?);
    }
    Ok((b.net, trace))
}
