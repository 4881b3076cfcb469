use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Identifier of any model element. Identifiers match `[A-Za-z_][A-Za-z0-9_]*`.
pub type Id = String;

/// Design-time clock value.
pub type Tick = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ActorKind {
    Agent,
    Role,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Actor {
    pub id: Id,
    pub kind: ActorKind,
    /// Roles played by this actor; only agents may play roles.
    pub plays: BTreeSet<Id>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Goal {
    pub id: Id,
    pub label: String,
    /// The actor whose model contains the goal.
    pub actor: Id,
    /// Leaf goal that deliberately touches no information.
    pub atomic_no_info: bool,
    /// Goal withheld from mapping.
    pub excluded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DecompositionKind {
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub parent: Id,
    pub kind: DecompositionKind,
    /// Order matters for `And`: it drives sequencing in the mapped net.
    pub children: Vec<Id>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Information {
    pub id: Id,
    /// Value-change period in ticks.
    pub volatility: Tick,
    pub owner: Id,
    /// Direct sub-parts.
    pub parts: BTreeSet<Id>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProduceRel {
    pub goal: Id,
    pub info: Id,
    pub believability_check: bool,
    pub produced_at: Tick,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ReadType {
    Optional,
    Required,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadRel {
    pub goal: Id,
    pub info: Id,
    pub read_type: ReadType,
    pub believability_check: bool,
    pub purpose: String,
    pub required_parts: BTreeSet<Id>,
    pub read_at: Tick,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModifyRel {
    pub goal: Id,
    pub info: Id,
    /// Tick of the modification; when absent the provenance chain places it
    /// at the first production of the information.
    pub at: Option<Tick>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SendRel {
    pub goal: Id,
    pub info: Id,
    pub destination: Id,
    /// Maximum acceptable transmission window.
    pub timeliness: Tick,
    pub sent_at: Tick,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ProvisionKind {
    /// Normal provision.
    P,
    /// Integrity-preserving provision.
    IP,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provision {
    pub source: Id,
    pub target: Id,
    pub info: Id,
    pub kind: ProvisionKind,
    pub transmission_time: Tick,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DelegationSubject {
    Goal(Id),
    Permission(Id),
}

impl DelegationSubject {
    pub fn id(&self) -> &str {
        match self {
            DelegationSubject::Goal(id) | DelegationSubject::Permission(id) => id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Delegation {
    pub delegator: Id,
    pub delegatee: Id,
    pub subject: DelegationSubject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Operation {
    Produce,
    Read,
    Modify,
    Send,
}

impl Operation {
    pub const ALL: [Operation; 4] = [
        Operation::Produce,
        Operation::Read,
        Operation::Modify,
        Operation::Send,
    ];

    pub fn letter(self) -> char {
        match self {
            Operation::Produce => 'P',
            Operation::Read => 'R',
            Operation::Modify => 'M',
            Operation::Send => 'S',
        }
    }

    pub fn from_letter(c: &str) -> Option<Operation> {
        match c {
            "P" => Some(Operation::Produce),
            "R" => Some(Operation::Read),
            "M" => Some(Operation::Modify),
            "S" => Some(Operation::Send),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Operation::Produce => "produce",
            Operation::Read => "read",
            Operation::Modify => "modify",
            Operation::Send => "send",
        }
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermissionGrant {
    pub id: Id,
    pub grantor: Id,
    pub grantee: Id,
    pub info: Id,
    pub ops: BTreeSet<Operation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TrustPolarity {
    Trust,
    Distrust,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TrustScope {
    /// A delegated goal or permission grant.
    Goal(Id),
    Permission(Id),
    /// Information produced by the trustee.
    ProducedInfo(Id),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TrustRel {
    pub trustor: Id,
    pub trustee: Id,
    pub polarity: TrustPolarity,
    pub scope: TrustScope,
}

/// A goal model with its information-quality annotations.
///
/// Collections are keyed so that two models with the same content compare
/// equal regardless of declaration order. The only ordered data are the
/// children of a decomposition.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalModel {
    pub actors: BTreeMap<Id, Actor>,
    pub goals: BTreeMap<Id, Goal>,
    /// Keyed by parent goal.
    pub decompositions: BTreeMap<Id, Decomposition>,
    pub information: BTreeMap<Id, Information>,
    /// Keyed by (goal, info).
    pub produces: BTreeMap<(Id, Id), ProduceRel>,
    /// Keyed by (goal, info).
    pub reads: BTreeMap<(Id, Id), ReadRel>,
    /// Keyed by (goal, info).
    pub modifies: BTreeMap<(Id, Id), ModifyRel>,
    /// Keyed by (goal, info, destination).
    pub sends: BTreeMap<(Id, Id, Id), SendRel>,
    /// Keyed by (source, target, info).
    pub provisions: BTreeMap<(Id, Id, Id), Provision>,
    pub delegations: BTreeSet<Delegation>,
    pub permissions: BTreeMap<Id, PermissionGrant>,
    pub trust: BTreeSet<TrustRel>,
}

impl GoalModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.actors.is_empty() && self.goals.is_empty() && self.information.is_empty()
    }

    /// Goals that are not the parent of any decomposition.
    pub fn leaf_goals(&self) -> BTreeSet<Id> {
        self.goals
            .keys()
            .filter(|g| !self.decompositions.contains_key(*g))
            .cloned()
            .collect()
    }

    pub fn is_leaf(&self, goal: &str) -> bool {
        self.goals.contains_key(goal) && !self.decompositions.contains_key(goal)
    }

    /// Parent of `goal` in the decomposition forest, if any.
    pub fn parent_of(&self, goal: &str) -> Option<&Id> {
        self.decompositions
            .values()
            .find(|d| d.children.iter().any(|c| c == goal))
            .map(|d| &d.parent)
    }

    /// Goals that are not the child of any decomposition, in id order.
    pub fn root_goals(&self) -> Vec<Id> {
        let children: BTreeSet<&Id> = self
            .decompositions
            .values()
            .flat_map(|d| d.children.iter())
            .collect();
        self.goals
            .keys()
            .filter(|g| !children.contains(g))
            .cloned()
            .collect()
    }

    /// True if the goal takes part in any produce/read/modify/send relation.
    pub fn has_info_relation(&self, goal: &str) -> bool {
        self.produces.keys().any(|(g, _)| g == goal)
            || self.reads.keys().any(|(g, _)| g == goal)
            || self.modifies.keys().any(|(g, _)| g == goal)
            || self.sends.keys().any(|(g, _, _)| g == goal)
    }

    /// Descendants of `info` under part-of, including `info` itself.
    pub fn parts_closure(&self, info: &str) -> BTreeSet<Id> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![info.to_string()];
        while let Some(i) = stack.pop() {
            if !seen.insert(i.clone()) {
                continue;
            }
            if let Some(inf) = self.information.get(&i) {
                stack.extend(inf.parts.iter().cloned());
            }
        }
        seen
    }

    /// Agents that play `role`.
    pub fn players_of<'a>(&'a self, role: &'a str) -> impl Iterator<Item = &'a Id> + 'a {
        self.actors
            .values()
            .filter(move |a| a.plays.contains(role))
            .map(|a| &a.id)
    }

    /// Follows the goal-delegation chain from the owning actor to its end.
    pub fn resolve_responsibility(&self, goal: &str) -> Result<Id, DelegationCycle> {
        let chain = self.delegation_chain(goal)?;
        Ok(chain.last().cloned().unwrap_or_default())
    }

    /// The actors visited by the goal-delegation chain, starting with the owner.
    pub fn delegation_chain(&self, goal: &str) -> Result<Vec<Id>, DelegationCycle> {
        let Some(g) = self.goals.get(goal) else {
            return Ok(Vec::new());
        };
        let subject = DelegationSubject::Goal(goal.to_string());
        let mut chain = vec![g.actor.clone()];
        loop {
            let current = chain.last().unwrap();
            let next = self
                .delegations
                .iter()
                .find(|d| d.subject == subject && &d.delegator == current);
            match next {
                None => return Ok(chain),
                Some(d) => {
                    if chain.contains(&d.delegatee) {
                        chain.push(d.delegatee.clone());
                        return Err(DelegationCycle {
                            goal: goal.to_string(),
                            actors: chain,
                        });
                    }
                    chain.push(d.delegatee.clone());
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("delegation cycle for goal {goal}: {}", actors.join(" -> "))]
pub struct DelegationCycle {
    pub goal: Id,
    pub actors: Vec<Id>,
}
