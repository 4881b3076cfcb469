//! DOT renderings of a net and of its reachability graph.

use wfav::parser::parse_wfa_net;
use wfav::wfa::{net_to_dot, reachability_graph, reachability_to_dot, ExecNet, Semantics};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/orblock.wfa");
    let net = parse_wfa_net(&std::fs::read_to_string(path).unwrap(), path).unwrap().value;
    print!("{}", net_to_dot(&net));
    let exec = ExecNet::new(&net);
    let g = reachability_graph(&exec, &Semantics::information(), exec.initial_configuration(), 1).expect("bounded");
    print!("{}", reachability_to_dot(&exec, &g));
}
