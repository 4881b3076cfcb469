mod common;

use common::{map_model, model, mutants, net, read};
use wfav::mapper::MappingTrace;
use wfav::properties::{check_all, CheckError, CheckOptions, PropertyId};

#[test]
fn optional_read_is_a_warning_unless_strict() {
    let m = model("roles.gqm");
    let (n, t) = map_model(&m);
    let lax = check_all(&m, &n, Some(&t), &CheckOptions::default()).unwrap();
    assert!(lax.is_clean(), "{:?}", lax.violations);
    assert_eq!(lax.warnings.len(), 1);
    let strict = check_all(&m, &n, Some(&t), &CheckOptions { strict_optional_reads: true, ..Default::default() }).unwrap();
    assert_eq!(strict.properties(), [PropertyId::Q2].into());
}

#[test]
fn trace_digest_must_match() {
    let trace = MappingTrace::parse(&read("andblock.trace")).unwrap();
    let r = check_all(&model("orblock.gqm"), &net("orblock.wfa"), Some(&trace), &CheckOptions::default());
    assert!(matches!(r, Err(CheckError::InputMismatch { .. })));
}

#[test]
fn mapped_fixtures_are_sound() {
    for stem in ["andblock", "orblock", "iqbase", "clean", "stock_market"] {
        let m = model(&format!("{stem}.gqm"));
        let (n, t) = map_model(&m);
        let r = check_all(&m, &n, Some(&t), &CheckOptions::default()).unwrap();
        assert!(r.is_clean(), "{stem}: {:?}", r.violations);
        assert!(r.soundness.unwrap().sound);
        assert!(r.gated_soundness.is_some());
    }
}

#[test]
fn witnesses_are_firing_sequences() {
    for mu in mutants() {
        let Some(n) = &mu.net else { continue };
        let m = model(&mu.model);
        let n = net(n);
        let trace = mu.trace.as_ref().map(|t| MappingTrace::parse(&read(t)).unwrap());
        let r = check_all(&m, &n, trace.as_ref(), &CheckOptions { bound: mu.bound, ..Default::default() }).unwrap();
        for v in &r.violations {
            if let Some(w) = &v.witness {
                assert!(w.iter().all(|t| n.transitions.contains_key(t) || t.contains('>')), "{v}");
            }
        }
    }
}
