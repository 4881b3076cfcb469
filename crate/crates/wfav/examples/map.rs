//! Map a goal model to a workflow net with actors and print the net and trace.

use wfav::iq::analyze_all;
use wfav::mapper::{identify_blocks, map_to_net};
use wfav::parser::{parse_goal_model, print_wfa_net};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/orblock.gqm");
    let model = parse_goal_model(&std::fs::read_to_string(path).unwrap(), path).unwrap().value;
    let blocks = identify_blocks(&model).expect("complete blocks");
    let verdicts = analyze_all(&model).expect("verdicts");
    let (net, trace) = map_to_net(&model, &blocks, &verdicts).expect("mapping");
    print!("{}", print_wfa_net(&net));
    print!("{}", trace.to_text());
}
