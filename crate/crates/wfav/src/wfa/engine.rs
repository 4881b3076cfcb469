use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::net::{NodeKind, Transition, WfaNet};
use crate::model::{Id, Tick};

/// Which enabledness clauses apply.
///
/// Clause (a) is always on: every input place holds a token. `info_flow` adds
/// clause (b), the responsible actor holds every consumed item. `gate` adds
/// clause (c): transitions mapped to `false` are blocked by an IQ verdict.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Semantics {
    pub info_flow: bool,
    pub gate: Option<BTreeMap<Id, bool>>,
}

impl Semantics {
    pub fn control_flow() -> Self {
        Semantics::default()
    }

    pub fn information() -> Self {
        Semantics { info_flow: true, gate: None }
    }

    pub fn full(gate: BTreeMap<Id, bool>) -> Self {
        Semantics { info_flow: true, gate: Some(gate) }
    }
}

/// A transition of the executable net. Arcs between two nodes of the same kind
/// are bridged by implicit nodes whose ids contain `>`.
#[derive(Debug, Clone)]
pub struct ExecTransition {
    pub id: Id,
    pub implicit: bool,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
    pub info: Option<Transition>,
}

#[derive(Debug, Clone)]
pub struct ExecNet {
    pub places: Vec<Id>,
    pub transitions: Vec<ExecTransition>,
    pub initial: usize,
    pub final_place: usize,
    place_index: HashMap<Id, usize>,
}

impl ExecNet {
    /// Bipartite normal form of `net`: a transition-to-transition arc gets an
    /// anonymous place, a place-to-place arc a silent transition.
    pub fn new(net: &WfaNet) -> ExecNet {
        let mut places: BTreeSet<Id> = net.places.clone();
        let mut trans: BTreeMap<Id, (bool, BTreeSet<Id>, BTreeSet<Id>, Option<Transition>)> = net
            .transitions
            .iter()
            .map(|(id, t)| (id.clone(), (false, BTreeSet::new(), BTreeSet::new(), Some(t.clone()))))
            .collect();
        for (from, to) in &net.arcs {
            let bridge = format!("{from}>{to}");
            match (net.node_kind(from), net.node_kind(to)) {
                (Some(NodeKind::Place), Some(NodeKind::Transition)) => {
                    trans.get_mut(to).unwrap().1.insert(from.clone());
                }
                (Some(NodeKind::Transition), Some(NodeKind::Place)) => {
                    trans.get_mut(from).unwrap().2.insert(to.clone());
                }
                (Some(NodeKind::Transition), Some(NodeKind::Transition)) => {
                    places.insert(bridge.clone());
                    trans.get_mut(from).unwrap().2.insert(bridge.clone());
                    trans.get_mut(to).unwrap().1.insert(bridge);
                }
                (Some(NodeKind::Place), Some(NodeKind::Place)) => {
                    trans.insert(
                        bridge,
                        (true, BTreeSet::from([from.clone()]), BTreeSet::from([to.clone()]), None),
                    );
                }
                _ => {}
            }
        }
        let places: Vec<Id> = places.into_iter().collect();
        let place_index: HashMap<Id, usize> =
            places.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let idx = |s: &BTreeSet<Id>| s.iter().map(|p| place_index[p]).collect();
        let transitions = trans
            .into_iter()
            .map(|(id, (implicit, ins, outs, info))| ExecTransition {
                id,
                implicit,
                inputs: idx(&ins),
                outputs: idx(&outs),
                info,
            })
            .collect();
        // a missing initial/final place leaves an index that never holds a token
        let initial = place_index.get(&net.initial).copied().unwrap_or(usize::MAX);
        let final_place = place_index.get(&net.final_place).copied().unwrap_or(usize::MAX);
        ExecNet { places, transitions, initial, final_place, place_index }
    }

    pub fn place(&self, id: &str) -> Option<usize> {
        self.place_index.get(id).copied()
    }

    pub fn transition(&self, id: &str) -> Option<usize> {
        self.transitions.iter().position(|t| t.id == id)
    }

    pub fn initial_configuration(&self) -> Configuration {
        let mut marking = vec![0; self.places.len()];
        if let Some(m) = marking.get_mut(self.initial) {
            *m = 1;
        }
        Configuration { marking, info: BTreeMap::new(), steps: 0 }
    }

    fn is_final(&self, c: &Configuration) -> bool {
        c.marking.iter().enumerate().all(|(i, n)| *n == u32::from(i == self.final_place))
    }

    fn improper(&self, c: &Configuration) -> bool {
        let fin = c.marking.get(self.final_place).copied().unwrap_or(0);
        fin >= 1 && c.marking.iter().sum::<u32>() > 1
    }
}

/// Marking plus information state. Equality and hashing ignore the ticks at
/// which items were acquired and the step counter.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Configuration {
    pub marking: Vec<u32>,
    /// (information, holder) -> tick of first acquisition
    pub info: BTreeMap<(Id, Id), Tick>,
    pub steps: u64,
}

impl PartialEq for Configuration {
    fn eq(&self, other: &Self) -> bool {
        self.marking == other.marking && self.info.keys().eq(other.info.keys())
    }
}

impl Eq for Configuration {}

impl Hash for Configuration {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.marking.hash(state);
        for k in self.info.keys() {
            k.hash(state);
        }
    }
}

impl Configuration {
    pub fn holds(&self, info: &str, actor: &str) -> bool {
        self.info.contains_key(&(info.to_string(), actor.to_string()))
    }

    pub fn tokens(&self) -> u32 {
        self.marking.iter().sum()
    }

    /// Non-empty places with their token counts.
    pub fn marking_map(&self, net: &ExecNet) -> BTreeMap<Id, u32> {
        self.marking
            .iter()
            .enumerate()
            .filter(|(_, n)| **n > 0)
            .map(|(i, n)| (net.places[i].clone(), *n))
            .collect()
    }

    pub fn describe(&self, net: &ExecNet) -> String {
        let m: Vec<String> = self
            .marking_map(net)
            .into_iter()
            .map(|(p, n)| if n == 1 { p } else { format!("{p}*{n}") })
            .collect();
        let i: Vec<String> = self.info.keys().map(|(i, a)| format!("{i}@{a}")).collect();
        format!("[{}] {{{}}}", m.join(","), i.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Disabled {
    /// Input place without a token.
    Marking(Id),
    /// Consumed information not held by the responsible actor.
    InformationFlow(Id),
    /// Blocked by an unsatisfied IQ verdict.
    Iq,
}

impl fmt::Display for Disabled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Disabled::Marking(p) => write!(f, "marking: no token in {p}"),
            Disabled::InformationFlow(i) => write!(f, "information-flow: {i} not held"),
            Disabled::Iq => f.write_str("IQ: unsatisfied verdict"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("transition {transition} not enabled: {reason}")]
    NotEnabled { transition: Id, reason: Disabled },
    #[error("token bound {bound} exceeded in place {place} after [{}]", .sequence.join(" "))]
    BoundExceeded { bound: u32, place: Id, sequence: Vec<Id> },
}

/// Clause (a), then (b), then (c); the first failing clause is the reason.
pub fn enabled(
    net: &ExecNet,
    sem: &Semantics,
    c: &Configuration,
    t: usize,
) -> Result<(), Disabled> {
    let tr = &net.transitions[t];
    if let Some(p) = tr.inputs.iter().find(|p| c.marking[**p] == 0) {
        return Err(Disabled::Marking(net.places[*p].clone()));
    }
    if tr.inputs.is_empty() {
        // a transition without input would fire forever
        return Err(Disabled::Marking(String::new()));
    }
    if let Some(info) = &tr.info {
        if sem.info_flow {
            if let Some(i) = info.consumed_info().into_iter().find(|i| !c.holds(i, &info.res)) {
                return Err(Disabled::InformationFlow(i.clone()));
            }
        }
        if let Some(gate) = &sem.gate {
            if gate.get(&tr.id) == Some(&false) {
                return Err(Disabled::Iq);
            }
        }
    }
    Ok(())
}

/// Fires `t` as step `steps + 1`, moving tokens and recording produced and
/// sent information.
pub fn fire(
    net: &ExecNet,
    sem: &Semantics,
    c: &Configuration,
    t: usize,
) -> Result<Configuration, EngineError> {
    enabled(net, sem, c, t).map_err(|reason| EngineError::NotEnabled {
        transition: net.transitions[t].id.clone(),
        reason,
    })?;
    let tr = &net.transitions[t];
    let mut next = c.clone();
    next.steps += 1;
    for p in &tr.inputs {
        next.marking[*p] -= 1;
    }
    for p in &tr.outputs {
        next.marking[*p] += 1;
    }
    if let Some(info) = &tr.info {
        for i in &info.pd {
            next.info.entry((i.clone(), info.res.clone())).or_insert(next.steps);
        }
        for (i, d) in &info.sd {
            next.info.entry((i.clone(), d.clone())).or_insert(next.steps);
        }
    }
    Ok(next)
}

#[derive(Debug, Clone)]
pub struct ReachabilityGraph {
    pub nodes: Vec<Configuration>,
    /// (from, transition index, to)
    pub edges: Vec<(usize, usize, usize)>,
    parent: Vec<Option<(usize, usize)>>,
}

impl ReachabilityGraph {
    pub fn root(&self) -> usize {
        0
    }

    /// Transition ids along the BFS tree from the root to `node`.
    pub fn firing_sequence(&self, net: &ExecNet, mut node: usize) -> Vec<Id> {
        let mut seq = Vec::new();
        while let Some((prev, t)) = self.parent[node] {
            seq.push(net.transitions[t].id.clone());
            node = prev;
        }
        seq.reverse();
        seq
    }

    /// Transition indices that label at least one edge.
    pub fn fired(&self) -> BTreeSet<usize> {
        self.edges.iter().map(|e| e.1).collect()
    }
}

/// Breadth-first exploration with transitions tried in id order.
pub fn reachability_graph(
    net: &ExecNet,
    sem: &Semantics,
    initial: Configuration,
    bound: u32,
) -> Result<ReachabilityGraph, EngineError> {
    let mut g = ReachabilityGraph { nodes: vec![initial.clone()], edges: Vec::new(), parent: vec![None] };
    let mut seen: HashMap<Configuration, usize> = HashMap::from([(initial, 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(n) = queue.pop_front() {
        for t in 0..net.transitions.len() {
            let Ok(next) = fire(net, sem, &g.nodes[n], t) else { continue };
            let target = match seen.get(&next) {
                Some(&m) => m,
                None => {
                    let m = g.nodes.len();
                    g.nodes.push(next.clone());
                    g.parent.push(Some((n, t)));
                    if let Some(p) = next.marking.iter().position(|k| *k > bound) {
                        return Err(EngineError::BoundExceeded {
                            bound,
                            place: net.places[p].clone(),
                            sequence: g.firing_sequence(net, m),
                        });
                    }
                    seen.insert(next, m);
                    queue.push_back(m);
                    m
                }
            };
            g.edges.push((n, t, target));
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoundnessReport {
    pub option_to_complete: bool,
    pub proper_completion: bool,
    pub no_dead_transitions: bool,
    pub sound: bool,
    pub states: usize,
    pub edges: usize,
    /// Firing sequence to a configuration from which completion is impossible.
    pub stuck_witness: Option<Vec<Id>>,
    /// Firing sequence to a configuration marking the final place with other tokens.
    pub improper_witness: Option<Vec<Id>>,
    pub dead: Vec<Id>,
}

pub fn soundness_of(net: &ExecNet, g: &ReachabilityGraph) -> SoundnessReport {
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); g.nodes.len()];
    for (a, _, b) in &g.edges {
        preds[*b].push(*a);
    }
    let mut can_finish = vec![false; g.nodes.len()];
    let mut queue: VecDeque<usize> =
        (0..g.nodes.len()).filter(|n| net.is_final(&g.nodes[*n])).collect();
    for n in &queue {
        can_finish[*n] = true;
    }
    while let Some(n) = queue.pop_front() {
        for p in &preds[n] {
            if !can_finish[*p] {
                can_finish[*p] = true;
                queue.push_back(*p);
            }
        }
    }
    let stuck = (0..g.nodes.len()).find(|n| !can_finish[*n]);
    let improper = (0..g.nodes.len()).find(|n| net.improper(&g.nodes[*n]));
    let fired = g.fired();
    let dead: Vec<Id> = (0..net.transitions.len())
        .filter(|t| !fired.contains(t))
        .map(|t| net.transitions[t].id.clone())
        .collect();
    let option_to_complete = stuck.is_none();
    let proper_completion = improper.is_none();
    let no_dead_transitions = dead.is_empty();
    SoundnessReport {
        option_to_complete,
        proper_completion,
        no_dead_transitions,
        sound: option_to_complete && proper_completion && no_dead_transitions,
        states: g.nodes.len(),
        edges: g.edges.len(),
        stuck_witness: stuck.map(|n| g.firing_sequence(net, n)),
        improper_witness: improper.map(|n| g.firing_sequence(net, n)),
        dead,
    }
}

/// Option to complete, proper completion and absence of dead transitions.
pub fn check_soundness(
    net: &ExecNet,
    sem: &Semantics,
    initial: Configuration,
    bound: u32,
) -> Result<SoundnessReport, EngineError> {
    let g = reachability_graph(net, sem, initial, bound)?;
    Ok(soundness_of(net, &g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(text: &str) -> ExecNet {
        ExecNet::new(&crate::parser::parse_wfa_net(text, "t").unwrap().value)
    }

    const MINIMAL: &str = "place i\nplace o\ntrans t res=A\narc i t\narc t o\ninitial i\nfinal o\n";

    #[test]
    fn minimal_graph() {
        let n = net(MINIMAL);
        let g = reachability_graph(&n, &Semantics::information(), n.initial_configuration(), 1).unwrap();
        assert_eq!((g.nodes.len(), g.edges.len()), (2, 1));
        assert!(soundness_of(&n, &g).sound);
    }

    #[test]
    fn info_flow_blocks_read() {
        let n = net("place i\nplace o\ntrans t res=A rd={I}\narc i t\narc t o\ninitial i\nfinal o\n");
        let c = n.initial_configuration();
        assert_eq!(
            enabled(&n, &Semantics::information(), &c, 0),
            Err(Disabled::InformationFlow("I".into()))
        );
        assert!(enabled(&n, &Semantics::control_flow(), &c, 0).is_ok());
        let r = check_soundness(&n, &Semantics::information(), c, 1).unwrap();
        assert_eq!(r.dead, vec!["t".to_string()]);
        assert!(!r.option_to_complete);
    }

    #[test]
    fn gate_blocks() {
        let n = net(MINIMAL);
        let sem = Semantics::full(BTreeMap::from([("t".to_string(), false)]));
        assert_eq!(enabled(&n, &sem, &n.initial_configuration(), 0), Err(Disabled::Iq));
    }

    #[test]
    fn produce_then_send() {
        let n = net("place i\nplace o\ntrans t res=A pd={I} sd={I@B}\narc i t\narc t o\ninitial i\nfinal o\n");
        let c = fire(&n, &Semantics::information(), &n.initial_configuration(), 0).unwrap();
        assert_eq!(c.info.len(), 2);
        assert_eq!(c.info[&("I".into(), "B".into())], 1);
        assert!(matches!(
            fire(&n, &Semantics::information(), &c, 0),
            Err(EngineError::NotEnabled { .. })
        ));
    }

    #[test]
    fn unbounded_generator() {
        let n = net("place i\nplace o\ntrans t res=A\ntrans u res=A\narc i t\narc t i\narc t o\narc o u\ninitial i\nfinal o\n");
        let e = reachability_graph(&n, &Semantics::control_flow(), n.initial_configuration(), 1).unwrap_err();
        assert!(matches!(e, EngineError::BoundExceeded { ref sequence, .. } if sequence == &["t", "t"]), "{e}");
    }

    #[test]
    fn bridges_consecutive_nodes() {
        let n = net("place i\nplace m\nplace o\ntrans t res=A\ntrans u res=A\narc i t\narc t u\narc u m\narc m o\ninitial i\nfinal o\n");
        assert!(n.place("t>u").is_some());
        assert!(n.transition("m>o").is_some());
        let r = check_soundness(&n, &Semantics::control_flow(), n.initial_configuration(), 1).unwrap();
        assert!(r.sound);
        assert_eq!(r.states, 4);
    }

    #[test]
    fn improper_completion_detected() {
        let n = net("place i\nplace a\nplace o\ntrans t res=A\ntrans u res=A\narc i t\narc t a\narc t o\narc a u\narc u o\ninitial i\nfinal o\n");
        let r = check_soundness(&n, &Semantics::control_flow(), n.initial_configuration(), 2).unwrap();
        assert!(!r.proper_completion);
        assert_eq!(r.improper_witness, Some(vec!["t".to_string()]));
    }
}
