mod common;

use std::process::{Command, Output};

use common::fixture;
use wfav::pipeline::RunReport;
use wfav::properties::PropertyId;

fn wfav(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wfav")).args(args).output().expect("spawn wfav")
}

fn path(rel: &str) -> String {
    fixture(rel).to_string_lossy().into_owned()
}

fn json(args: &[&str]) -> (RunReport, i32) {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = wfav(&all);
    let text = String::from_utf8(out.stdout).unwrap();
    (RunReport::from_json(&text).unwrap_or_else(|e| panic!("{e}\n{text}")), out.status.code().unwrap())
}

#[test]
fn exit_codes() {
    assert_eq!(wfav(&["check", &path("clean.gqm")]).status.code(), Some(0));
    assert_eq!(wfav(&["check", &path("flashcrash_stub.gqm")]).status.code(), Some(1));
    let missing = wfav(&["check", &path("missing.gqm")]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("missing.gqm"));
}

#[test]
fn json_report_round_trips() {
    let (r, code) = json(&["check", &path("flashcrash.gqm")]);
    assert_eq!(code, 1);
    assert_eq!(r.exit_code, 1);
    let props: std::collections::BTreeSet<PropertyId> = r.violations.iter().map(|v| v.property).collect();
    assert_eq!(props, [PropertyId::Q3, PropertyId::Q5, PropertyId::Q7].into());
    assert_eq!(RunReport::from_json(&r.to_json()).unwrap(), r);
}

#[test]
fn map_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("andblock.wfa");
    let o = out.to_string_lossy().into_owned();
    assert_eq!(wfav(&["map", &path("andblock.gqm"), "-o", &o]).status.code(), Some(0));
    let trace = dir.path().join("andblock.trace").to_string_lossy().into_owned();
    assert!(std::path::Path::new(&trace).exists());
    let v = wfav(&["verify", &path("andblock.gqm"), &o, "--trace", &trace]);
    assert_eq!(v.status.code(), Some(0), "{}", String::from_utf8_lossy(&v.stdout));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), std::fs::read_to_string(fixture("andblock.wfa")).unwrap());
}

#[test]
fn trace_for_another_model_is_rejected() {
    let v = wfav(&["verify", &path("orblock.gqm"), &path("andblock.wfa"), "--trace", &path("andblock.trace")]);
    assert_ne!(v.status.code(), Some(0));
}

#[test]
fn verify_reports_alternation_break() {
    let (r, code) = json(&["verify", &path("andblock.gqm"), &path("corrupted.wfa")]);
    assert_eq!(code, 1);
    assert!(r.violations.iter().any(|v| v.property == PropertyId::C2));
}

#[test]
fn export_counts_nodes_and_edges() {
    let out = wfav(&["export", &path("andblock.wfa")]);
    assert_eq!(out.status.code(), Some(0));
    let dot = String::from_utf8(out.stdout).unwrap();
    let net = common::net("andblock.wfa");
    let nodes = dot.lines().filter(|l| l.contains("[shape=")).count();
    let edges = dot.lines().filter(|l| l.contains("->")).count();
    assert_eq!(nodes, net.places.len() + net.transitions.len());
    assert_eq!(edges, net.arcs.len());
    let rg = String::from_utf8(wfav(&["export", "--reachability", &path("andblock.wfa")]).stdout).unwrap();
    assert!(rg.starts_with("// nodes=4 edges=3\n"), "{rg}");
    assert_eq!(rg.lines().filter(|l| l.contains("->")).count(), 3);
}

#[test]
fn emit_facts_writes_datalog() {
    let dir = tempfile::tempdir().unwrap();
    let facts = dir.path().join("m.dl");
    let f = facts.to_string_lossy().into_owned();
    assert_eq!(wfav(&["check", &path("iqbase.gqm"), "--emit-facts", &f]).status.code(), Some(0));
    let p = wfav::datalog::parse_program(&std::fs::read_to_string(&facts).unwrap()).unwrap();
    assert!(!p.edb.is_empty() && p.rules.is_empty());
}

#[test]
fn output_is_deterministic() {
    for args in [vec!["check", "x"], vec!["--format", "json", "check", "x"]] {
        let args: Vec<String> = args.iter().map(|a| if *a == "x" { path("flashcrash.gqm") } else { a.to_string() }).collect();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(wfav(&args).stdout, wfav(&args).stdout);
    }
}
