use std::collections::BTreeSet;

use super::types::{DelegationSubject, GoalModel, Id, Operation};

/// The least set of `(actor, info, operation)` triples an actor is entitled to.
///
/// Entitlements originate at the information owner and flow along permission
/// grants and permission delegations; agents additionally inherit whatever
/// the roles they play hold.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PermissionTable {
    held: BTreeSet<(Id, Id, Operation)>,
}

impl PermissionTable {
    pub fn compute(model: &GoalModel) -> Self {
        let mut held: BTreeSet<(Id, Id, Operation)> = BTreeSet::new();
        for info in model.information.values() {
            for op in Operation::ALL {
                held.insert((info.owner.clone(), info.id.clone(), op));
            }
        }
        loop {
            let mut added = Vec::new();
            for grant in model.permissions.values() {
                for &op in &grant.ops {
                    if held.contains(&(grant.grantor.clone(), grant.info.clone(), op)) {
                        added.push((grant.grantee.clone(), grant.info.clone(), op));
                    }
                }
            }
            for d in &model.delegations {
                let DelegationSubject::Permission(gid) = &d.subject else {
                    continue;
                };
                let Some(grant) = model.permissions.get(gid) else {
                    continue;
                };
                for &op in &grant.ops {
                    if held.contains(&(d.delegator.clone(), grant.info.clone(), op)) {
                        added.push((d.delegatee.clone(), grant.info.clone(), op));
                    }
                }
            }
            for (actor, info, op) in &held {
                for agent in model.players_of(actor) {
                    added.push((agent.clone(), info.clone(), *op));
                }
            }
            let before = held.len();
            held.extend(added);
            if held.len() == before {
                break;
            }
        }
        PermissionTable { held }
    }

    pub fn holds(&self, actor: &str, info: &str, op: Operation) -> bool {
        self.held
            .contains(&(actor.to_string(), info.to_string(), op))
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Id, Id, Operation)> {
        self.held.iter()
    }
}
