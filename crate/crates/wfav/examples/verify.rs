//! Check a hand-edited net against the goal model it claims to implement.

use wfav::mapper::verify_mapping;
use wfav::parser::{parse_goal_model, parse_wfa_net};

fn main() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let model = parse_goal_model(&std::fs::read_to_string(format!("{dir}/andblock.gqm")).unwrap(), "andblock.gqm")
        .unwrap()
        .value;
    for file in ["andblock.wfa", "corrupted.wfa"] {
        let net = parse_wfa_net(&std::fs::read_to_string(format!("{dir}/{file}")).unwrap(), file).unwrap().value;
        let violations = verify_mapping(&model, &net, None);
        println!("{file}: {} violation(s)", violations.len());
        for v in violations {
            println!("  {v}");
        }
    }
}
