//! Workflow nets with actors: structure, execution and soundness.

mod dot;
mod engine;
mod net;

pub use dot::{net_to_dot, reachability_to_dot};
pub use engine::{
    check_soundness, enabled, fire, reachability_graph, soundness_of, Configuration, Disabled,
    EngineError, ExecNet, ExecTransition, ReachabilityGraph, Semantics, SoundnessReport,
};
pub use net::{NodeKind, StructureIssue, Transition, WfaNet};
