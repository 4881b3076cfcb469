//! Goal models annotated with information-quality requirements.
//!
//! A [`GoalModel`] holds actors (agents and roles), goals and their
//! and/or-decompositions, information items, and the social relations
//! between them: produce/read/modify/send, provision, delegation,
//! permission grants and trust.

mod permissions;
mod types;
mod validate;

pub use permissions::PermissionTable;
pub use types::*;
pub use validate::{validate_model, StructuralError, StructuralErrorKind};

/// Goals that are not the parent of any decomposition.
pub fn leaf_goals(model: &GoalModel) -> std::collections::BTreeSet<Id> {
    model.leaf_goals()
}

/// Final delegatee of `goal`, starting from its owning actor.
pub fn resolve_responsibility(model: &GoalModel, goal: &str) -> Result<Id, DelegationCycle> {
    model.resolve_responsibility(goal)
}
