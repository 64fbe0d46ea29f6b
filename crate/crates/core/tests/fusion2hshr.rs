use std::collections::BTreeSet;

use fusion_slp::fusion::{normalize, parse_agent, reductions};
use fusion_slp::fusion2hshr::*;
use fusion_slp::hshr::{parse_graph, Act, EnumOptions, Judgement, ProductionSource};
use fusion_slp::Name;

const QRS: &str = "(u x y z w)(Q(x,y,z) | 'u<x y>.R(u,x) | u<z w>.S(z,w))";

fn n(s: &str) -> Name {
    Name::parse(s)
}

fn graph(s: &str) -> Judgement {
    parse_graph(s).unwrap()
}

#[test]
fn translation_of_the_three_component_process() {
    let g = translate_agent(&parse_agent(QRS).unwrap()).unwrap();
    let expected = graph(
        "nodes u, x, y, z, w; \"L{Q(x1, x2, x3)}\"(x1, y1, z1) | \"L{'x1<x2 x3>.R(x4, x5)}\"(u1, x2, y2, u2, x3) \
         | \"L{x1<x2 x3>.S(x4, x5)}\"(u3, z2, w1, z3, w2) | m4(u, u1, u2, u3) | m4(x, x1, x2, x3) | m3(y, y1, y2) \
         | m4(z, z1, z2, z3) | m3(w, w1, w2) | n(u) | n(x) | n(y) | n(w) | n(z)",
    );
    assert!(graphs_equal_up_to_renaming(&g, &expected));
    assert_eq!(g.nodes.len(), 18);
}

#[test]
fn process_productions_for_prefixes() {
    let out = process_productions("L{'x1<x2 x3>.R(x4, x5)}", ProductionOptions::default()).unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].name.as_deref(), Some("out1"));
    assert_eq!(
        out[0].to_string(),
        "\"L{'x1<x2 x3>.R(x4, x5)}\"(x1, x2, x3, x4, x5) --[x1: out2<x2 x3>]--> \"L{R(x1, x2)}\"(x4, x5) | n(x1)"
    );
    let inp = process_productions("L{x1<x2 x3>.S(x4, x5)}", ProductionOptions::default()).unwrap();
    assert_eq!(inp[0].label.act(&n("x1")), Act::new("in2", vec![n("x2"), n("x3")]));
    assert!(process_productions("L{Q(x1, x2)}", ProductionOptions::default()).unwrap().is_empty());
    assert!(process_productions("Q", ProductionOptions::default()).is_err());
}

#[test]
fn fusion_production_exposes_nothing_and_adds_a_connector() {
    let ps = process_productions("L{{x1=x2}.P(x3)}", ProductionOptions::default()).unwrap();
    assert_eq!(ps.len(), 1);
    let p = &ps[0];
    assert!(p.label.lambda.values().all(Act::is_eps));
    assert!(p.label.pi.is_empty());
    let m2: Vec<_> = p.target.edges.iter().filter(|e| &*e.label == "m2").collect();
    assert_eq!(m2.len(), 1);
    assert_eq!(m2[0].att, vec![n("x1"), n("x2")]);
    p.validate().unwrap();
}

#[test]
fn auxiliary_productions() {
    let p = auxiliary_production(4, 2, 2, 4).unwrap();
    assert_eq!(p.label.act(&n("t2")), Act::new("in2", vec![n("p1"), n("p2")]));
    assert_eq!(p.label.act(&n("t4")), Act::new("out2", vec![n("q1"), n("q2")]));
    assert_eq!(p.label.act(&n("t1")), Act::Eps);
    assert_eq!(p.target.edges.len(), 3);
    p.validate().unwrap();
    let empty = auxiliary_production(2, 0, 1, 2).unwrap();
    assert_eq!(empty.target.edges.len(), 1);
    assert!(auxiliary_production(3, 1, 2, 2).is_err());
    assert!(auxiliary_production(3, 1, 0, 2).is_err());

    let src = FusionProductions::new([1, 2].into(), ProductionOptions::default());
    assert_eq!(src.productions_for(&"m3".into(), 3).len(), 2 * 6);
    assert!(src.productions_for(&"n".into(), 1).is_empty());
}

#[test]
fn amoeboid_classification() {
    let simple = classify_amoeboid(&graph("m3(a, b, c)"), None);
    assert_eq!(simple.classification, AmoeboidClass::Simple(3));
    let chain = classify_amoeboid(&graph("m2(a, b) | m2(b, c) | m2(c, d)"), None);
    assert_eq!(chain.classification, AmoeboidClass::Structured);
    assert_eq!(chain.external, [n("a"), n("d")].into());
    let even = classify_amoeboid(&graph("m2(a, b) | m2(b, c)"), None);
    assert_eq!(even.classification, AmoeboidClass::NotAmoeboid);
    assert!(!even.parity_ok);
    let ring = classify_amoeboid(&graph("m2(a, b) | m2(b, a)"), None);
    assert_eq!(ring.classification, AmoeboidClass::Pseudo);
    let mixed = classify_amoeboid(&graph("m3(a, b, i) | m2(i, j) | m3(j, c, d)"), None);
    assert_eq!(mixed.classification, AmoeboidClass::Structured);
    let claimed: BTreeSet<Name> = [n("a")].into();
    assert_eq!(classify_amoeboid(&graph("m3(a, b, c)"), Some(&claimed)).classification, AmoeboidClass::NotAmoeboid);
    let branching = classify_amoeboid(&graph("m2(a, b) | m2(a, c) | m2(a, d)"), None);
    assert_eq!(branching.classification, AmoeboidClass::NotAmoeboid);
}

#[test]
fn normalization_collapses_amoeboids() {
    let g = graph("P(a, c) | m2(a, b) | m2(b, i) | m2(i, c) | m2(r, s) | m2(s, r) | n(d)");
    let norm = normalize_graph(&g).unwrap();
    assert!(graphs_equal_up_to_renaming(&norm, &graph("P(a, c) | m2(a, c) | m1(d)")));
    assert!(normalize_graph(&graph("P(b) | m2(a, b) | m2(b, c)")).is_err());
}

#[test]
fn the_filtered_transition_matches_the_reduct() {
    let a = parse_agent(QRS).unwrap();
    let (g, src) = translate_with_productions(&a, ProductionOptions::default()).unwrap();
    let en = filtered_transitions(&g, &src, EnumOptions::default());
    assert_eq!(en.transitions.len(), 1);
    let t = &en.transitions[0];
    assert!(interleaving_filter(t));
    let mut exposed: Vec<String> =
        t.label.lambda.values().filter_map(|a| a.signature()).map(|(s, _)| s.to_string()).collect();
    exposed.sort();
    assert_eq!(exposed, ["in2", "out2"]);
    let rs = reductions(&normalize(&a).unwrap());
    assert_eq!(rs.len(), 1);
    let reduct = translate_process(&rs[0].result, None, None).unwrap();
    assert!(normalized_equal(&t.target, &reduct).unwrap());
    let summary = provenance_summary(t);
    assert_eq!(summary.get("out1"), Some(&1));
    assert_eq!(summary.get("in1"), Some(&1));
}

fn reductions_match_transitions(src: &str) {
    let a = parse_agent(src).unwrap();
    let (g, prods) = translate_with_productions(&a, ProductionOptions::default()).unwrap();
    let en = filtered_transitions(&g, &prods, EnumOptions::default());
    assert!(!en.incomplete);
    let targets: Vec<Judgement> = en.transitions.iter().map(|t| normalize_graph(&t.target).unwrap()).collect();
    let reducts: Vec<Judgement> = reductions(&normalize(&a).unwrap())
        .iter()
        .map(|r| normalize_graph(&translate_process(&r.result, None, None).unwrap()).unwrap())
        .collect();
    for r in &reducts {
        assert!(targets.iter().any(|t| graphs_equal_up_to_renaming(t, r)), "{src}: no transition for {r}");
    }
    for t in &targets {
        assert!(reducts.iter().any(|r| graphs_equal_up_to_renaming(t, r)), "{src}: no reduct for {t}");
    }
}

#[test]
fn reductions_and_transitions_correspond() {
    reductions_match_transitions(QRS);
    reductions_match_transitions("(u x y)(u<x>.{x=y}.'x<y>.0 | 'u<y>.x<y>.0)");
    reductions_match_transitions("(u z)('u<z>.0 | rec X.(x)u<x>.('u<x>.0 | X))");
    reductions_match_transitions("(u)(u<>.0 | 'u<>.0 | 'u<>.0)");
    reductions_match_transitions("0");
}

#[test]
fn stuck_process_has_no_filtered_transition() {
    let a = parse_agent("(u v)(u<>.0 | 'v<>.0)").unwrap();
    let (g, prods) = translate_with_productions(&a, ProductionOptions::default()).unwrap();
    assert!(filtered_transitions(&g, &prods, EnumOptions::default()).transitions.is_empty());
}

#[test]
fn connector_degrees_in_a_translation() {
    let g = translate_agent(&parse_agent(QRS).unwrap()).unwrap();
    let profile = g.label_profile();
    assert_eq!(profile.get(&("m4".into(), 4)), Some(&3));
    assert_eq!(profile.get(&("m3".into(), 3)), Some(&2));
    assert_eq!(profile.get(&("n".into(), 1)), Some(&5));
    for comp in amoeboid_components(&g) {
        let r = classify_amoeboid(&comp, None);
        assert!(matches!(r.classification, AmoeboidClass::Simple(_) | AmoeboidClass::Structured), "{comp}");
    }
}
