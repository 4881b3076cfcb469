//! The property suite: mapping, control-flow, information-flow and IQ checks
//! over a goal model and the WFA-net that implements it.

mod violation;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use violation::{Category, PropertyId, Violation};

use crate::iq::{analyze_all, Dimension, Facet, IqError, IqVerdict};
use crate::mapper::{model_digest, verify_mapping, MappingTrace};
use crate::model::{GoalModel, Id, Operation, PermissionTable, ReadType};
use crate::wfa::{check_soundness, reachability_graph, EngineError, ExecNet, Semantics, SoundnessReport, StructureIssue, WfaNet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOptions {
    /// Token bound for state-space exploration.
    pub bound: u32,
    /// Report believability failures of optional reads as Q2 violations.
    pub strict_optional_reads: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { bound: 1, strict_optional_reads: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("input mismatch: trace was made for model {trace}, given model is {model}")]
    InputMismatch { trace: String, model: String },
    #[error(transparent)]
    Iq(#[from] IqError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    /// Sorted by property, then elements.
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
    pub verdicts: Vec<IqVerdict>,
    /// Control-flow soundness of the net.
    pub soundness: Option<SoundnessReport>,
    /// Soundness with information flow and IQ gates; informational only.
    pub gated_soundness: Option<SoundnessReport>,
}

impl CheckReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn properties(&self) -> BTreeSet<PropertyId> {
        self.violations.iter().map(|v| v.property).collect()
    }
}

/// Q1-Q7 from IQ verdicts, plus warnings for optional reads that would fail Q2.
pub fn iq_violations(model: &GoalModel, verdicts: &[IqVerdict], strict_optional_reads: bool) -> (Vec<Violation>, Vec<String>) {
    use PropertyId::*;
    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for v in verdicts.iter().filter(|v| !v.satisfied) {
        let facets: Vec<&str> = v.failed.iter().map(|f| f.name()).collect();
        let msg = format!("{} fails {} [{}]", v.dimension, facets.join(","), v.witness.join(","));
        let mut push = |p: PropertyId| out.push(Violation::new(p, vec![v.goal.clone(), v.info.clone()], msg.clone()));
        match v.dimension {
            Dimension::Accessibility => push(Q1),
            Dimension::Believability if v.has_failed(Facet::ReadCheck) => {
                let optional = model
                    .reads
                    .get(&(v.goal.clone(), v.info.clone()))
                    .is_some_and(|r| r.read_type == ReadType::Optional);
                if optional && !strict_optional_reads {
                    warnings.push(format!("optional read of {} by {} is not believability-checked", v.info, v.goal));
                } else {
                    push(Q2);
                }
            }
            Dimension::Believability => {}
            Dimension::Trustworthiness => {
                if v.has_failed(Facet::SourceTrust) {
                    push(Q3);
                }
                if v.has_failed(Facet::ProvisionTrust) {
                    push(Q4);
                }
            }
            Dimension::Accuracy if v.has_failed(Facet::ProductionAccuracy) => push(Q3),
            Dimension::Accuracy => {}
            Dimension::Completeness => push(Q5),
            Dimension::Timeliness => push(Q6),
            Dimension::Consistency => push(Q7),
        }
    }
    (out, warnings)
}

/// C1 and C3-C5 over the control-flow behaviour of `net`.
fn control_flow(net: &WfaNet, exec: &ExecNet, bound: u32, out: &mut Vec<Violation>) -> Option<SoundnessReport> {
    use PropertyId::*;
    for issue in net.workflow_issues() {
        let e = match &issue {
            StructureIssue::Sources(s) | StructureIssue::Sinks(s) => s.clone(),
            StructureIssue::TransitionWithoutInput(t) | StructureIssue::NotOnPath(t) => vec![t.clone()],
            _ => continue,
        };
        out.push(Violation::new(C1, e, issue.to_string()));
    }
    match check_soundness(exec, &Semantics::control_flow(), exec.initial_configuration(), bound) {
        Ok(r) => {
            if let Some(w) = &r.stuck_witness {
                out.push(Violation::new(C3, vec![], "a reachable marking cannot reach the final marking").with_witness(w.clone()));
            }
            if let Some(w) = &r.improper_witness {
                out.push(Violation::new(C4, vec![net.final_place.clone()], "final place marked while other tokens remain").with_witness(w.clone()));
            }
            for t in &r.dead {
                out.push(Violation::new(C5, vec![t.clone()], "transition can never fire"));
            }
            Some(r)
        }
        Err(EngineError::BoundExceeded { bound, place, sequence }) => {
            out.push(
                Violation::new(C3, vec![place.clone()], format!("state space exceeds token bound {bound} in {place}"))
                    .with_witness(sequence),
            );
            None
        }
        Err(e) => {
            out.push(Violation::new(C3, vec![], e.to_string()));
            None
        }
    }
}

fn provided(model: &GoalModel, from: &str, to: &str, info: &str) -> bool {
    let selves = |a: &str| -> BTreeSet<Id> {
        let mut s = BTreeSet::from([a.to_string()]);
        if let Some(actor) = model.actors.get(a) {
            s.extend(actor.plays.iter().cloned());
        }
        s
    };
    let (src, dst) = (selves(from), selves(to));
    model.provisions.values().any(|p| p.info == info && src.contains(&p.source) && dst.contains(&p.target))
}

/// I1-I3 from the explored state space. Every firing records what it
/// produces and sends, so the first consumption of an item before its
/// responsible actor holds it is observable.
fn information_flow(model: &GoalModel, net: &WfaNet, exec: &ExecNet, bound: u32, out: &mut Vec<Violation>) {
    use PropertyId::*;
    let produced: BTreeSet<&Id> = net.transitions.values().flat_map(|t| t.pd.iter()).collect();
    let perms = PermissionTable::compute(model);
    for t in net.transitions.values() {
        for (i, d) in &t.sd {
            if !provided(model, &t.res, d, i) {
                out.push(Violation::new(I2, vec![t.id.clone(), i.clone(), d.clone()], format!("no provision of {i} from {} to {d}", t.res)));
            }
        }
        for i in &t.md {
            if !perms.holds(&t.res, i, Operation::Modify) {
                out.push(Violation::new(I3, vec![t.id.clone(), i.clone()], format!("{} lacks modify permission", t.res)));
            }
        }
    }
    let Ok(g) = reachability_graph(exec, &Semantics::control_flow(), exec.initial_configuration(), bound) else {
        return;
    };
    let mut reported: BTreeSet<(PropertyId, Id, Id)> = BTreeSet::new();
    for (from, ti, _) in &g.edges {
        let Some(t) = &exec.transitions[*ti].info else { continue };
        let c = &g.nodes[*from];
        let early = t
            .rd
            .iter()
            .chain(t.sd.iter().map(|(i, _)| i).filter(|i| !t.pd.contains(*i)))
            .map(|i| (I1, i))
            .chain(t.md.iter().map(|i| (I3, i)));
        for (p, i) in early {
            if produced.contains(i) && !c.holds(i, &t.res) && reported.insert((p, t.id.clone(), i.clone())) {
                out.push(
                    Violation::new(p, vec![t.id.clone(), i.clone()], format!("{} uses {i} before holding it", t.res))
                        .with_witness(g.firing_sequence(exec, *from)),
                );
            }
        }
    }
}

/// Gate map for the net: a transition is blocked when a verdict on its goal fails.
fn gates(model: &GoalModel, net: &WfaNet, verdicts: &[IqVerdict], trace: Option<&MappingTrace>) -> BTreeMap<Id, bool> {
    if let Some(t) = trace {
        if !t.gates.is_empty() {
            return t.gates.clone();
        }
    }
    model
        .goals
        .keys()
        .map(|g| (format!("t_{g}"), verdicts.iter().filter(|v| &v.goal == g).all(|v| v.satisfied)))
        .filter(|(t, _)| net.transitions.contains_key(t))
        .collect()
}

/// Runs every property against `model` and `net`.
pub fn check_all(
    model: &GoalModel,
    net: &WfaNet,
    trace: Option<&MappingTrace>,
    opts: &CheckOptions,
) -> Result<CheckReport, CheckError> {
    if let Some(t) = trace {
        let digest = model_digest(model);
        if t.model_digest != digest {
            return Err(CheckError::InputMismatch { trace: t.model_digest.clone(), model: digest });
        }
    }
    let verdicts = analyze_all(model)?;
    let mut violations = verify_mapping(model, net, trace);
    let exec = ExecNet::new(net);
    let soundness = control_flow(net, &exec, opts.bound, &mut violations);
    information_flow(model, net, &exec, opts.bound, &mut violations);
    let (iq, warnings) = iq_violations(model, &verdicts, opts.strict_optional_reads);
    violations.extend(iq);
    violations.sort();
    violations.dedup();
    let gated_soundness = check_soundness(
        &exec,
        &Semantics::full(gates(model, net, &verdicts, trace)),
        exec.initial_configuration(),
        opts.bound,
    )
    .ok();
    Ok(CheckReport { violations, warnings, verdicts, soundness, gated_soundness })
}
