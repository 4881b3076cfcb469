mod common;

use common::{corpus, model};
use wfav::datalog::Value;
use wfav::iq::{
    analyze_all, analyze_direct, check_accuracy, check_trustworthiness, evaluate_axioms, provenance_chain, ChainOp, Dimension,
    Facet, IqError,
};
use wfav::parser::parse_goal_model;

#[test]
fn routes_agree_on_every_model() {
    for f in corpus(".gqm") {
        let m = model(&f);
        assert_eq!(analyze_all(&m).unwrap(), analyze_direct(&m).unwrap(), "{f}");
    }
}

#[test]
fn unbelievable_production_is_inaccurate() {
    let m = model("flashcrash_stub.gqm");
    let db = evaluate_axioms(&m).unwrap();
    let inacc = db.relation("inaccurate").unwrap();
    assert!(inacc.contains(&vec![Value::sym("flicker_quote"), Value::sym("hft_goal")]));
    let acc = check_accuracy(&m).unwrap();
    let v = acc.iter().find(|v| v.goal == "hft_goal").unwrap();
    assert!(v.has_failed(Facet::ProductionAccuracy));
    assert!(acc.iter().all(|v| v.dimension == Dimension::Accuracy));
}

#[test]
fn distrust_fails_source_trust() {
    let m = model("flashcrash_stub.gqm");
    let t = check_trustworthiness(&m).unwrap();
    let bad: Vec<_> = t.iter().filter(|v| !v.satisfied).map(|v| (v.goal.as_str(), v.info.as_str())).collect();
    assert_eq!(bad, vec![("market_goal", "stub_quote_info")]);
}

#[test]
fn clean_model_satisfies_everything() {
    assert!(analyze_all(&model("clean.gqm")).unwrap().iter().all(|v| v.satisfied));
    assert!(analyze_all(&model("iqbase.gqm")).unwrap().iter().all(|v| v.satisfied));
}

#[test]
fn read_before_production_is_an_error() {
    let text = "actor A kind=agent\ninfo I volatility=5 owner=A\n\
                goal P \"p\" actor=A\ngoal R \"r\" actor=A\n\
                produce P I check=B at=4\nread R I type=R check=B purpose=\"x\" at=1\n";
    let m = parse_goal_model(text, "t").unwrap().value;
    assert!(matches!(analyze_all(&m), Err(IqError::InconsistentTimestamps(_))));
    assert!(matches!(analyze_direct(&m), Err(IqError::InconsistentTimestamps(_))));
}

#[test]
fn provenance_starts_with_production() {
    let m = model("iqbase.gqm");
    let c = provenance_chain(&m, "I1").unwrap().unwrap();
    assert_eq!(c.events[0].op, ChainOp::Produce);
    assert!(c.events.windows(2).all(|w| w[0].tick <= w[1].tick));
    assert!(provenance_chain(&m, "nothing").unwrap().is_none());
}
