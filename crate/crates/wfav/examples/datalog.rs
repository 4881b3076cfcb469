//! The stratified Datalog engine on its own: reachability with negation.

use wfav::datalog::{evaluate, parse_program, stratify};

const PROGRAM: &str = "
edge(a,b). edge(b,c). edge(c,a). edge(d,e).
node(a). node(b). node(c). node(d). node(e).
path(X,Y) :- edge(X,Y).
path(X,Z) :- path(X,Y), edge(Y,Z).
cyclic(X) :- path(X,X).
acyclic(X) :- node(X), not cyclic(X).
";

fn main() {
    let program = parse_program(PROGRAM).expect("well-formed program");
    println!("{} strata", stratify(&program).expect("stratifiable").len());
    let db = evaluate(&program).expect("evaluates");
    for f in db.facts().filter(|f| &*f.pred == "cyclic" || &*f.pred == "acyclic") {
        println!("{f}");
    }
}
