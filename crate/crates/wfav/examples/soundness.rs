//! Explore the state space of a net and decide soundness, with and without
//! information flow.

use wfav::parser::parse_wfa_net;
use wfav::wfa::{check_soundness, ExecNet, Semantics};

fn main() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    for file in ["parallel.wfa", "deadread.wfa", "improper.wfa"] {
        let net = parse_wfa_net(&std::fs::read_to_string(format!("{dir}/{file}")).unwrap(), file).unwrap().value;
        let exec = ExecNet::new(&net);
        for (name, sem) in [("control-flow", Semantics::control_flow()), ("information", Semantics::information())] {
            match check_soundness(&exec, &sem, exec.initial_configuration(), 1) {
                Ok(r) => println!("{file} {name}: sound={} states={} dead={:?}", r.sound, r.states, r.dead),
                Err(e) => println!("{file} {name}: {e}"),
            }
        }
    }
}
