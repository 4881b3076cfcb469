use std::fmt::Write;

use super::engine::{ExecNet, ReachabilityGraph};
use super::net::WfaNet;

fn esc(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz text for the net. Places are circles, transitions boxes labelled
/// with their responsible actor and information sets.
pub fn net_to_dot(net: &WfaNet) -> String {
    let mut out = String::from("digraph wfa {\n  rankdir=LR;\n");
    for p in &net.places {
        let extra = if *p == net.initial || *p == net.final_place { ",peripheries=2" } else { "" };
        writeln!(out, "  \"{}\" [shape=circle{extra}];", esc(p)).unwrap();
    }
    for t in net.transitions.values() {
        let mut label = format!("{}\\nres={}", esc(&t.id), esc(&t.res));
        for (k, s) in [("pd", &t.pd), ("rd", &t.rd), ("md", &t.md)] {
            if !s.is_empty() {
                let v: Vec<&str> = s.iter().map(String::as_str).collect();
                write!(label, "\\n{k}={}", esc(&v.join(","))).unwrap();
            }
        }
        if !t.sd.is_empty() {
            let v: Vec<String> = t.sd.iter().map(|(i, d)| format!("{i}@{d}")).collect();
            write!(label, "\\nsd={}", esc(&v.join(","))).unwrap();
        }
        writeln!(out, "  \"{}\" [shape=box,label=\"{label}\"];", esc(&t.id)).unwrap();
    }
    for (a, b) in &net.arcs {
        writeln!(out, "  \"{}\" -> \"{}\";", esc(a), esc(b)).unwrap();
    }
    out.push_str("}\n");
    out
}

/// Graphviz text for a reachability graph; the header comment carries the
/// node and edge counts.
pub fn reachability_to_dot(net: &ExecNet, g: &ReachabilityGraph) -> String {
    let mut out = format!("// nodes={} edges={}\ndigraph reachability {{\n", g.nodes.len(), g.edges.len());
    for (i, c) in g.nodes.iter().enumerate() {
        writeln!(out, "  c{i} [label=\"{}\"];", esc(&c.describe(net))).unwrap();
    }
    for (a, t, b) in &g.edges {
        writeln!(out, "  c{a} -> c{b} [label=\"{}\"];", esc(&net.transitions[*t].id)).unwrap();
    }
    out.push_str("}\n");
    out
}
