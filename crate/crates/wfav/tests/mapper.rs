mod common;

use common::{map_model, model, net, random_tree_model, read};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wfav::mapper::{identify_blocks, map_to_net, model_digest, verify_mapping, MappingError, MappingTrace, SINK, SOURCE};
use wfav::parser::{parse_goal_model, print_wfa_net};
use wfav::properties::PropertyId;

#[test]
fn data_order_is_respected() {
    let (n, trace) = map_model(&model("andblock.gqm"));
    assert!(n.precedes("t_G2", "t_G3"));
    assert_eq!(trace.transition_of("G4").map(String::as_str), Some("t_G4"));
    assert_eq!(trace.goal_of("t_G3").map(String::as_str), Some("G3"));
    assert_eq!((n.initial.as_str(), n.final_place.as_str()), (SOURCE, SINK));
}

#[test]
fn stored_fixtures_match_fresh_mapping() {
    for stem in ["andblock", "orblock", "iqbase"] {
        let m = model(&format!("{stem}.gqm"));
        let (n, trace) = map_model(&m);
        assert_eq!(print_wfa_net(&n), read(&format!("{stem}.wfa")), "{stem}");
        let stored = MappingTrace::parse(&read(&format!("{stem}.trace"))).unwrap();
        assert_eq!(stored.model_digest, model_digest(&m));
        assert_eq!(stored.pairs, trace.pairs);
    }
}

#[test]
fn trace_text_round_trip() {
    let (_, trace) = map_model(&model("iqbase.gqm"));
    let back = MappingTrace::parse(&trace.to_text()).unwrap();
    assert_eq!(back.to_text(), trace.to_text());
    assert_eq!(back.pairs, trace.pairs);
    assert_eq!(back.gates, trace.gates);
}

#[test]
fn cyclic_data_dependency_is_reported() {
    let text = "actor A kind=agent\ninfo I volatility=1 owner=A\ninfo J volatility=1 owner=A\n\
                goal R \"r\" actor=A\ngoal X \"x\" actor=A\ngoal Y \"y\" actor=A\n\
                decompose R and X Y\n\
                produce X I check=B at=0\nread X J type=R check=B purpose=\"p\" at=1\n\
                produce Y J check=B at=0\nread Y I type=R check=B purpose=\"p\" at=1\n";
    let m = parse_goal_model(text, "cyc").unwrap().value;
    let blocks = identify_blocks(&m).unwrap();
    match map_to_net(&m, &blocks, &[]) {
        Err(MappingError::CyclicDataDependency(ids)) => assert_eq!(ids, vec!["X".to_string(), "Y".to_string()]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn empty_model_maps_to_single_place() {
    let m = parse_goal_model("", "e").unwrap().value;
    let (n, _) = map_model(&m);
    assert_eq!(n.initial, n.final_place);
    assert!(n.transitions.is_empty());
}

#[test]
fn fresh_mappings_verify_clean() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..60 {
        let m = random_tree_model(&mut rng, 3);
        let (n, trace) = map_model(&m);
        assert!(verify_mapping(&m, &n, Some(&trace)).is_empty());
        assert!(verify_mapping(&m, &n, None).is_empty());
    }
}

#[test]
fn corrupted_net_breaks_alternation() {
    let m = model("andblock.gqm");
    let v = verify_mapping(&m, &net("corrupted.wfa"), None);
    assert!(v.iter().any(|x| x.property == PropertyId::C2), "{v:?}");
}
