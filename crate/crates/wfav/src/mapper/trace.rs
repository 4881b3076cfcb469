use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::blocks::BuildingBlock;
use crate::model::{GoalModel, Id};
use crate::parser::print_goal_model;

pub const TRACE_HEADER: &str = "# wfav mapping trace";

/// Goal-to-transition correspondence kept next to a mapped net.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingTrace {
    /// SHA-256 of the canonical text of the source model.
    pub model_digest: String,
    pub pairs: BTreeMap<Id, Id>,
    /// Transition -> whether every IQ verdict of its goal is satisfied.
    pub gates: BTreeMap<Id, bool>,
    /// Goal -> actors from the owner to the final delegatee.
    pub chains: BTreeMap<Id, Vec<Id>>,
    /// Block trees in mapped order. Not part of the text form.
    #[serde(skip)]
    pub blocks: Vec<BuildingBlock>,
}

pub fn model_digest(model: &GoalModel) -> String {
    hex::encode(Sha256::digest(print_goal_model(model).as_bytes()))
}

impl MappingTrace {
    pub fn to_text(&self) -> String {
        let mut out = format!("{TRACE_HEADER}\nmodel {}\n", self.model_digest);
        for (g, t) in &self.pairs {
            writeln!(out, "map {g} {t}").unwrap();
        }
        for (t, ok) in &self.gates {
            writeln!(out, "gate {t} {}", if *ok { "ok" } else { "blocked" }).unwrap();
        }
        for (g, chain) in &self.chains {
            writeln!(out, "chain {g} {}", chain.join(" ")).unwrap();
        }
        out
    }

    /// Parses the text form; errors carry the 1-based line number.
    pub fn parse(text: &str) -> Result<MappingTrace, (usize, String)> {
        let mut t = MappingTrace::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            let bad = || (n + 1, format!("malformed trace line '{line}'"));
            match words.as_slice() {
                ["model", d] => t.model_digest = d.to_string(),
                ["map", g, tr] => {
                    t.pairs.insert(g.to_string(), tr.to_string());
                }
                ["gate", tr, s @ ("ok" | "blocked")] => {
                    t.gates.insert(tr.to_string(), *s == "ok");
                }
                ["chain", g, actors @ ..] if !actors.is_empty() => {
                    t.chains.insert(g.to_string(), actors.iter().map(|a| a.to_string()).collect());
                }
                _ => return Err(bad()),
            }
        }
        Ok(t)
    }

    pub fn transition_of(&self, goal: &str) -> Option<&Id> {
        self.pairs.get(goal)
    }

    pub fn goal_of(&self, transition: &str) -> Option<&Id> {
        self.pairs.iter().find(|(_, t)| *t == transition).map(|(g, _)| g)
    }
}
