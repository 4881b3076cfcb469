use std::collections::{BTreeMap, BTreeSet};

use super::facts::extract_facts;
use super::{Dimension, Facet, IqError, IqVerdict};
use crate::datalog::{evaluate, parse_program, Database, DatalogError, Program, Value};
use crate::model::{GoalModel, Id};

/// The bundled axiom program text.
pub const AXIOMS: &str = include_str!("axioms.dl");

/// The axioms without any model facts.
pub fn axiom_program() -> Program {
    parse_program(AXIOMS).expect("bundled axioms parse")
}

/// Axioms plus the facts of `model`, evaluated to the perfect model.
pub fn evaluate_axioms(model: &GoalModel) -> Result<Database, DatalogError> {
    let mut p = axiom_program();
    p.edb.extend(extract_facts(model));
    evaluate(&p)
}

fn text(db: &Database, pred: &str) -> Vec<Vec<String>> {
    db.relation(pred)
        .into_iter()
        .flatten()
        .map(|t| {
            t.iter()
                .map(|v| match v {
                    Value::Sym(s) => s.to_string(),
                    Value::Int(i) => i.to_string(),
                })
                .collect()
        })
        .collect()
}

/// Verdicts read off the evaluated axioms.
pub fn analyze_datalog(model: &GoalModel) -> Result<Vec<IqVerdict>, IqError> {
    for g in model.goals.keys() {
        model.resolve_responsibility(g)?;
    }
    let db = evaluate_axioms(model)?;
    let errors: Vec<(Id, Id)> = text(&db, "ts_error")
        .into_iter()
        .map(|t| (t[0].clone(), t[1].clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if !errors.is_empty() {
        return Err(IqError::InconsistentTimestamps(errors));
    }
    let mut verdicts: BTreeMap<(Id, Id, Dimension), (BTreeSet<Facet>, BTreeSet<Id>)> = BTreeMap::new();
    for t in text(&db, "applies") {
        let d = Dimension::from_name(&t[2]).expect("known dimension");
        verdicts.entry((t[0].clone(), t[1].clone(), d)).or_default();
    }
    for t in text(&db, "fail") {
        let d = Dimension::from_name(&t[2]).expect("known dimension");
        let f = Facet::from_name(&t[3]).expect("known facet");
        let e = verdicts.get_mut(&(t[0].clone(), t[1].clone(), d)).expect("failure on applicable triple");
        e.0.insert(f);
        e.1.insert(t[4].clone());
    }
    Ok(verdicts
        .into_iter()
        .map(|((goal, info, dimension), (failed, witness))| IqVerdict {
            goal,
            info,
            dimension,
            satisfied: failed.is_empty(),
            failed: failed.into_iter().collect(),
            witness: witness.into_iter().collect(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datalog::stratify;

    #[test]
    fn axioms_stratify_shallow() {
        let p = axiom_program();
        let strata = stratify(&p).unwrap();
        assert!(strata.len() <= 4, "{} strata", strata.len());
    }

    #[test]
    fn empty_model_no_verdicts() {
        assert!(analyze_datalog(&GoalModel::new()).unwrap().is_empty());
    }
}
