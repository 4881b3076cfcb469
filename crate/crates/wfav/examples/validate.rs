//! Structural validation of a goal model that parses but is ill-formed.

use wfav::model::validate_model;
use wfav::parser::parse_goal_model;

const MODEL: &str = r#"
actor M kind=agent
goal G1 "top" actor=M
goal G2 "child" actor=M
goal G3 "loop" actor=M
decompose G1 and G2 G3
decompose G3 or G1 G2
"#;

fn main() {
    let model = parse_goal_model(MODEL, "bad.gqm").expect("parses").value;
    let errors = validate_model(&model);
    for e in &errors {
        println!("{:?} {:?}: {}", e.kind, e.elements, e.message);
    }
    println!("{} structural error(s)", errors.len());
}
