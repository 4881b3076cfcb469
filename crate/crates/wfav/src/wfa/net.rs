use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::Id;

/// An activity of a WFA-net with its responsible actor and information sets.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub id: Id,
    pub res: Id,
    pub pd: BTreeSet<Id>,
    pub rd: BTreeSet<Id>,
    pub md: BTreeSet<Id>,
    /// (information, destination actor)
    pub sd: BTreeSet<(Id, Id)>,
}

impl Transition {
    pub fn new(id: impl Into<Id>, res: impl Into<Id>) -> Self {
        Transition {
            id: id.into(),
            res: res.into(),
            ..Default::default()
        }
    }

    pub fn has_info(&self) -> bool {
        !(self.pd.is_empty() && self.rd.is_empty() && self.md.is_empty() && self.sd.is_empty())
    }

    /// Information the responsible actor must already hold before firing.
    ///
    /// Information that the activity itself produces may be sent in the same step.
    pub fn consumed_info(&self) -> BTreeSet<&Id> {
        self.rd
            .iter()
            .chain(self.md.iter())
            .chain(self.sd.iter().map(|(i, _)| i).filter(|i| !self.pd.contains(*i)))
            .collect()
    }

    /// Every information id mentioned by the activity.
    pub fn mentioned_info(&self) -> BTreeSet<&Id> {
        self.pd
            .iter()
            .chain(self.rd.iter())
            .chain(self.md.iter())
            .chain(self.sd.iter().map(|(i, _)| i))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Place,
    Transition,
}

/// Workflow net with actors.
///
/// Arcs are stored as given; alternation and the WF-net shape are reported by
/// [`WfaNet::structure_issues`] rather than enforced, so that hand-written or
/// damaged nets can still be loaded and audited.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WfaNet {
    pub places: BTreeSet<Id>,
    pub transitions: BTreeMap<Id, Transition>,
    pub arcs: BTreeSet<(Id, Id)>,
    pub initial: Id,
    pub final_place: Id,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum StructureIssue {
    ConsecutivePlaces(Id, Id),
    ConsecutiveTransitions(Id, Id),
    /// Places without incoming arcs, when that set is not exactly `{initial}`.
    Sources(Vec<Id>),
    /// Places without outgoing arcs, when that set is not exactly `{final}`.
    Sinks(Vec<Id>),
    /// Transitions with an empty preset fire unconditionally.
    TransitionWithoutInput(Id),
    NotOnPath(Id),
}

impl StructureIssue {
    /// True for breaches of place/transition alternation.
    pub fn is_alternation(&self) -> bool {
        matches!(
            self,
            StructureIssue::ConsecutivePlaces(..) | StructureIssue::ConsecutiveTransitions(..)
        )
    }
}

impl fmt::Display for StructureIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureIssue::ConsecutivePlaces(a, b) => write!(f, "consecutive places {a} -> {b}"),
            StructureIssue::ConsecutiveTransitions(a, b) => {
                write!(f, "consecutive transitions {a} -> {b}")
            }
            StructureIssue::Sources(s) => write!(
                f,
                "not a WF-net: source places {{{}}} (expected exactly the initial place)",
                s.join(",")
            ),
            StructureIssue::Sinks(s) => write!(
                f,
                "not a WF-net: sink places {{{}}} (expected exactly the final place)",
                s.join(",")
            ),
            StructureIssue::TransitionWithoutInput(t) => {
                write!(f, "not a WF-net: transition {t} has no input place")
            }
            StructureIssue::NotOnPath(n) => {
                write!(f, "not a WF-net: {n} is not on a path from source to sink")
            }
        }
    }
}

impl WfaNet {
    pub fn new(initial: impl Into<Id>, final_place: impl Into<Id>) -> Self {
        let initial = initial.into();
        let final_place = final_place.into();
        let mut net = WfaNet {
            initial: initial.clone(),
            final_place: final_place.clone(),
            ..Default::default()
        };
        net.places.insert(initial);
        net.places.insert(final_place);
        net
    }

    pub fn node_kind(&self, id: &str) -> Option<NodeKind> {
        if self.places.contains(id) {
            Some(NodeKind::Place)
        } else if self.transitions.contains_key(id) {
            Some(NodeKind::Transition)
        } else {
            None
        }
    }

    pub fn add_place(&mut self, id: impl Into<Id>) {
        self.places.insert(id.into());
    }

    pub fn add_transition(&mut self, t: Transition) {
        self.transitions.insert(t.id.clone(), t);
    }

    pub fn add_arc(&mut self, from: impl Into<Id>, to: impl Into<Id>) {
        self.arcs.insert((from.into(), to.into()));
    }

    /// Places with an arc into `node`.
    pub fn preset(&self, node: &str) -> Vec<&Id> {
        self.arcs
            .iter()
            .filter(|(_, to)| to == node)
            .map(|(from, _)| from)
            .filter(|n| self.places.contains(*n))
            .collect()
    }

    /// Places with an arc from `node`.
    pub fn postset(&self, node: &str) -> Vec<&Id> {
        self.arcs
            .iter()
            .filter(|(from, _)| from == node)
            .map(|(_, to)| to)
            .filter(|n| self.places.contains(*n))
            .collect()
    }

    pub fn successors<'a>(&'a self, node: &'a str) -> impl Iterator<Item = &'a Id> + 'a {
        self.arcs
            .iter()
            .filter(move |(from, _)| from == node)
            .map(|(_, to)| to)
    }

    pub fn predecessors<'a>(&'a self, node: &'a str) -> impl Iterator<Item = &'a Id> + 'a {
        self.arcs
            .iter()
            .filter(move |(_, to)| to == node)
            .map(|(from, _)| from)
    }

    /// Alternation breaches and WF-net shape problems, in a stable order.
    pub fn structure_issues(&self) -> Vec<StructureIssue> {
        let mut issues = self.alternation_issues();
        issues.extend(self.workflow_issues());
        issues
    }

    pub fn alternation_issues(&self) -> Vec<StructureIssue> {
        let mut issues = Vec::new();
        for (from, to) in &self.arcs {
            match (self.node_kind(from), self.node_kind(to)) {
                (Some(NodeKind::Place), Some(NodeKind::Place)) => {
                    issues.push(StructureIssue::ConsecutivePlaces(from.clone(), to.clone()))
                }
                (Some(NodeKind::Transition), Some(NodeKind::Transition)) => issues.push(
                    StructureIssue::ConsecutiveTransitions(from.clone(), to.clone()),
                ),
                _ => {}
            }
        }
        issues
    }

    /// Unique source and sink, and every node on a source-to-sink path.
    pub fn workflow_issues(&self) -> Vec<StructureIssue> {
        let mut issues = Vec::new();
        let sources: Vec<Id> = self
            .places
            .iter()
            .filter(|p| self.predecessors(p).next().is_none())
            .cloned()
            .collect();
        if sources != [self.initial.clone()] {
            issues.push(StructureIssue::Sources(sources));
        }
        let sinks: Vec<Id> = self
            .places
            .iter()
            .filter(|p| self.successors(p).next().is_none())
            .cloned()
            .collect();
        if sinks != [self.final_place.clone()] {
            issues.push(StructureIssue::Sinks(sinks));
        }
        for t in self.transitions.keys() {
            if self.predecessors(t).next().is_none() {
                issues.push(StructureIssue::TransitionWithoutInput(t.clone()));
            }
        }
        let forward = self.reach(&self.initial, true);
        let backward = self.reach(&self.final_place, false);
        for node in self.places.iter().chain(self.transitions.keys()) {
            if !forward.contains(node) || !backward.contains(node) {
                issues.push(StructureIssue::NotOnPath(node.clone()));
            }
        }
        issues
    }

    fn reach(&self, start: &str, forward: bool) -> BTreeSet<Id> {
        let mut seen = BTreeSet::new();
        if self.node_kind(start).is_none() {
            return seen;
        }
        let mut queue = VecDeque::from([start.to_string()]);
        while let Some(n) = queue.pop_front() {
            if !seen.insert(n.clone()) {
                continue;
            }
            let next: Vec<Id> = if forward {
                self.successors(&n).cloned().collect()
            } else {
                self.predecessors(&n).cloned().collect()
            };
            queue.extend(next);
        }
        seen
    }

    /// True if there is a directed path of length ≥ 1 from `from` to `to`.
    pub fn precedes(&self, from: &str, to: &str) -> bool {
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<Id> = self.successors(from).cloned().collect();
        while let Some(n) = queue.pop_front() {
            if n == to {
                return true;
            }
            if seen.insert(n.clone()) {
                queue.extend(self.successors(&n).cloned());
            }
        }
        false
    }
}
