use serde::{Deserialize, Serialize};

use crate::model::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChainOp {
    Produce,
    Modify,
    Send,
    Provide(ProvisionKind),
}

impl ChainOp {
    fn rank(self) -> u8 {
        match self {
            ChainOp::Produce => 0,
            ChainOp::Modify => 1,
            ChainOp::Send => 2,
            ChainOp::Provide(_) => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainEvent {
    pub actor: Id,
    pub op: ChainOp,
    pub tick: Tick,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceChain {
    pub info: Id,
    pub events: Vec<ChainEvent>,
    /// Ticks at which the order was decided by (actor, operation) alone.
    pub ties: Vec<Tick>,
}

/// Operations applied to `info`, ordered by tick.
///
/// Modifications without a tick and provisions are placed at the first
/// production. Events before the first production are moved up to it, and at
/// equal ticks productions come first, so the chain always starts with a
/// production. Other ties are broken by actor id, then operation. Returns
/// `None` when nothing produces `info`.
pub fn provenance_chain(m: &GoalModel, info: &str) -> Result<Option<ProvenanceChain>, DelegationCycle> {
    let Some(first) = m.produces.values().filter(|p| p.info == info).map(|p| p.produced_at).min() else {
        return Ok(None);
    };
    let mut events = Vec::new();
    for p in m.produces.values().filter(|p| p.info == info) {
        events.push(ChainEvent { actor: m.resolve_responsibility(&p.goal)?, op: ChainOp::Produce, tick: p.produced_at });
    }
    for r in m.modifies.values().filter(|r| r.info == info) {
        let tick = r.at.unwrap_or(first).max(first);
        events.push(ChainEvent { actor: m.resolve_responsibility(&r.goal)?, op: ChainOp::Modify, tick });
    }
    for s in m.sends.values().filter(|s| s.info == info) {
        events.push(ChainEvent { actor: m.resolve_responsibility(&s.goal)?, op: ChainOp::Send, tick: s.sent_at.max(first) });
    }
    for p in m.provisions.values().filter(|p| p.info == info) {
        events.push(ChainEvent { actor: p.source.clone(), op: ChainOp::Provide(p.kind), tick: first });
    }
    events.sort_by(|a, b| {
        (a.tick, a.op.rank().min(1), &a.actor, a.op).cmp(&(b.tick, b.op.rank().min(1), &b.actor, b.op))
    });
    let mut ties = Vec::new();
    for w in events.windows(2) {
        if w[0].tick == w[1].tick && (w[0].op == ChainOp::Produce) == (w[1].op == ChainOp::Produce) {
            ties.push(w[0].tick);
        }
    }
    ties.dedup();
    Ok(Some(ProvenanceChain { info: info.to_string(), events, ties }))
}
