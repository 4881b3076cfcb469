use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{DecompositionKind, GoalModel, Id};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockKind {
    Atomic,
    AndBlock,
    OrBlock,
}

/// A complete building block: an atomic goal or a goal with all the
/// children of its decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildingBlock {
    pub root: Id,
    pub kind: BlockKind,
    /// Leaf goals of the block, left to right.
    pub members: Vec<Id>,
    pub children: Vec<BuildingBlock>,
}

impl BuildingBlock {
    pub fn atomic(goal: &str) -> Self {
        BuildingBlock {
            root: goal.to_string(),
            kind: BlockKind::Atomic,
            members: vec![goal.to_string()],
            children: Vec::new(),
        }
    }

    /// Builds a composite block; `members` follow the children's order.
    pub fn composite(root: &str, kind: BlockKind, children: Vec<BuildingBlock>) -> Self {
        let members = children.iter().flat_map(|c| c.members.iter().cloned()).collect();
        BuildingBlock { root: root.to_string(), kind, members, children }
    }

    pub fn count(&self) -> usize {
        1 + self.children.iter().map(BuildingBlock::count).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlockError {
    #[error("partial block: child {child} of {parent} is excluded from mapping")]
    PartialBlock { parent: Id, child: Id },
}

/// One block tree per root goal, in goal-id order. Trees whose root is
/// excluded from mapping are left out.
pub fn identify_blocks(model: &GoalModel) -> Result<Vec<BuildingBlock>, BlockError> {
    fn walk(m: &GoalModel, g: &Id) -> Result<BuildingBlock, BlockError> {
        let Some(d) = m.decompositions.get(g) else {
            return Ok(BuildingBlock::atomic(g));
        };
        let mut children = Vec::new();
        for c in &d.children {
            if m.goals.get(c).is_some_and(|x| x.excluded) {
                return Err(BlockError::PartialBlock { parent: g.clone(), child: c.clone() });
            }
            children.push(walk(m, c)?);
        }
        let kind = match d.kind {
            DecompositionKind::And => BlockKind::AndBlock,
            DecompositionKind::Or => BlockKind::OrBlock,
        };
        Ok(BuildingBlock::composite(g, kind, children))
    }
    model
        .root_goals()
        .iter()
        .filter(|g| !model.goals[*g].excluded)
        .map(|g| walk(model, g))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_goal_model;

    fn model(extra: &str) -> GoalModel {
        let mut text = String::from("actor A kind=agent\n");
        for g in 1..=5 {
            text.push_str(&format!("goal G{g} \"g\" actor=A atomic-no-info\n"));
        }
        text.push_str(extra);
        parse_goal_model(&text, "b").unwrap().value
    }

    #[test]
    fn lone_goal_is_atomic() {
        let m = parse_goal_model("actor A kind=agent\ngoal G1 \"g\" actor=A atomic-no-info\n", "b").unwrap().value;
        assert_eq!(identify_blocks(&m).unwrap(), vec![BuildingBlock::atomic("G1")]);
    }

    #[test]
    fn nested_or_and() {
        let m = model("decompose G1 or G2 G3\ndecompose G3 and G4 G5\n");
        let b = identify_blocks(&m).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].kind, BlockKind::OrBlock);
        assert_eq!(b[0].members, ["G2", "G4", "G5"]);
        assert_eq!(b[0].children[1].kind, BlockKind::AndBlock);
    }

    #[test]
    fn excluded_child_is_partial() {
        let m = model("decompose G1 and G2 G3\n").clone();
        let mut m = m;
        m.goals.get_mut("G3").unwrap().excluded = true;
        assert_eq!(
            identify_blocks(&m),
            Err(BlockError::PartialBlock { parent: "G1".into(), child: "G3".into() })
        );
        m.goals.get_mut("G3").unwrap().excluded = false;
        m.goals.get_mut("G1").unwrap().excluded = true;
        let b = identify_blocks(&m).unwrap();
        assert_eq!(b.len(), 2, "G4 and G5 remain as roots");
    }
}
