//! Run every property over a model and its mapped net, as `wfav check` does.

use wfav::iq::analyze_all;
use wfav::mapper::{identify_blocks, map_to_net};
use wfav::parser::parse_goal_model;
use wfav::properties::{check_all, CheckOptions};

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "flashcrash.gqm".into());
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    let model = parse_goal_model(&std::fs::read_to_string(&path).unwrap(), &path).unwrap().value;
    let verdicts = analyze_all(&model).expect("verdicts");
    let (net, trace) = map_to_net(&model, &identify_blocks(&model).unwrap(), &verdicts).expect("mapping");
    let report = check_all(&model, &net, Some(&trace), &CheckOptions::default()).expect("check");
    for v in &report.violations {
        println!("{v}");
    }
    for w in &report.warnings {
        println!("warning: {w}");
    }
    println!("properties violated: {:?}", report.properties());
}
