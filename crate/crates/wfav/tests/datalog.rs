mod common;

use common::{naive_eval, random_program};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wfav::datalog::{emit_facts, evaluate, parse_program, stratify, DatalogError, Fact, Value};

fn path_facts(n: usize) -> String {
    (0..n).map(|i| format!("edge({i},{}).\n", i + 1)).collect()
}

#[test]
fn transitive_closure_of_a_chain() {
    for n in 1..=12 {
        let text = format!("{}path(X,Y) :- edge(X,Y).\npath(X,Z) :- path(X,Y), edge(Y,Z).\n", path_facts(n));
        let db = evaluate(&parse_program(&text).unwrap()).unwrap();
        assert_eq!(db.relation("path").unwrap().len(), n * (n + 1) / 2, "n={n}");
        assert!(db.contains(&Fact::new("path", vec![Value::Int(0), Value::Int(n as i64)])));
    }
}

#[test]
fn stratified_negation() {
    let text = "node(a). node(b). node(c). edge(a,b).\n\
                reach(X) :- edge(a,X).\n\
                unreached(X) :- node(X), not reach(X), not eq(X,a).\n";
    let db = evaluate(&parse_program(text).unwrap()).unwrap();
    let un: Vec<_> = db.relation("unreached").unwrap().iter().cloned().collect();
    assert_eq!(un, vec![vec![Value::sym("c")]]);
    let strata = stratify(&parse_program(text).unwrap()).unwrap();
    assert!(strata.len() >= 2);
}

#[test]
fn negative_cycle_is_rejected() {
    let p = parse_program("q(a).\np(X) :- q(X), not r(X).\nr(X) :- q(X), not p(X).\n").unwrap();
    assert!(matches!(evaluate(&p), Err(DatalogError::Stratification(_))));
}

#[test]
fn unsafe_rule_is_rejected() {
    assert!(matches!(parse_program("q(a).\np(X,Y) :- q(X).\n"), Err(DatalogError::Unsafe { .. })));
    assert!(matches!(parse_program("q(a).\np(X) :- q(X), not r(Y).\nr(b).\n"), Err(DatalogError::Unsafe { .. })));
}

#[test]
fn syntax_error_position() {
    match parse_program("p(a).\nq(X :- p(X).\n") {
        Err(DatalogError::Syntax { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn emitted_facts_parse_back() {
    let text = format!("{}path(X,Y) :- edge(X,Y).\npath(X,Z) :- path(X,Y), edge(Y,Z).\n", path_facts(4));
    let db = evaluate(&parse_program(&text).unwrap()).unwrap();
    let facts: Vec<Fact> = db.facts().collect();
    let back = parse_program(&emit_facts(&facts)).unwrap();
    assert_eq!(back.edb, facts.into_iter().collect());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn agrees_with_naive_fixpoint(seed in any::<u64>()) {
        let p = random_program(&mut ChaCha8Rng::seed_from_u64(seed));
        let db = evaluate(&p).unwrap();
        let got: std::collections::BTreeSet<Fact> = db.facts().collect();
        prop_assert_eq!(got, naive_eval(&p));
    }
}
