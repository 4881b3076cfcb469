//! Information-quality verdicts for a model, computed by both routes.

use wfav::iq::{analyze_all, analyze_direct, evaluate_axioms};
use wfav::parser::parse_goal_model;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/flashcrash_stub.gqm");
    let text = std::fs::read_to_string(path).expect("fixture");
    let model = parse_goal_model(&text, path).expect("parses").value;

    let verdicts = analyze_all(&model).expect("consistent model");
    assert_eq!(verdicts, analyze_direct(&model).expect("consistent model"));
    for v in verdicts.iter().filter(|v| !v.satisfied) {
        println!("{v}");
    }

    // derived relations are available too
    let db = evaluate_axioms(&model).expect("axioms evaluate");
    for t in db.relation("inaccurate").into_iter().flatten() {
        println!("{} is inaccurate for {}", t[0], t[1]);
    }
}
