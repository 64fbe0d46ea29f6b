use std::collections::BTreeMap;
use std::sync::Arc;

use fusion_slp::hshr::*;
use fusion_slp::Name;

const SPLIT: &str = "split: C(x, y) --[]--> nodes +z; C(x, z) | C(z, y)";
const STAR: &str = "star: C(x, y) --[x: r<w>, y: r<w>]--> nodes +w; S(y, w)";

fn prods(srcs: &[&str]) -> Vec<Arc<Production>> {
    srcs.iter().map(|s| Arc::new(parse_production(s).unwrap())).collect()
}

fn n(s: &str) -> Name {
    Name::parse(s)
}

fn pinned_equal(t: &Transition, expected: &Transition) -> bool {
    transitions_equal_fixing_source(t, expected)
}

fn expected(src: &str, label: &str, tgt: &str) -> Transition {
    let source = parse_graph(src).unwrap();
    let target = parse_graph(tgt).unwrap();
    let mut lambda: BTreeMap<Name, Act> = source.nodes.iter().map(|x| (x.clone(), Act::Eps)).collect();
    for (x, (a, ys)) in parse_new_nodes(label).unwrap() {
        lambda.insert(x, Act::Do(a, ys));
    }
    Transition { source, label: TransitionLabel { lambda, pi: BTreeMap::new() }, target, provenance: None }
}

#[test]
fn split_on_the_one_element_ring() {
    let ps = prods(&[SPLIT]);
    let g = parse_graph("nodes x; C(x, x)").unwrap();
    let t = derive_with(&g, &ps, &[Some(0)]).unwrap();
    assert!(pinned_equal(&t, &expected("nodes x; C(x, x)", "", "nodes x, y; C(x, y) | C(y, x)")));
    t.check().unwrap();
}

#[test]
fn ring_grows_to_four_then_becomes_a_star() {
    let ps = prods(&[SPLIT, STAR]);
    let mut g = parse_graph("nodes x; C(x, x)").unwrap();
    for _ in 0..3 {
        let mut picks = vec![None; g.edges.len()];
        picks[0] = Some(0);
        g = derive_with(&g, &ps, &picks).unwrap().target;
    }
    assert_eq!(g.edges.len(), 4);
    assert_eq!(g.nodes.len(), 4);
    let t = derive_with(&g, &ps, &[Some(1); 4]).unwrap();
    assert_eq!(t.target.nodes.len(), 5);
    let hub = t.target.nodes.difference(&g.nodes).next().unwrap().clone();
    assert!(t.target.edges.iter().all(|e| &*e.label == "S" && e.att[1] == hub));
    for x in &g.nodes {
        assert_eq!(t.label.act(x), Act::new("r", vec![hub.clone()]));
    }
    assert!(t.label.pi.is_empty());
}

#[test]
fn star_matches_the_expected_transition() {
    let ps = prods(&[STAR]);
    let g = parse_graph("nodes x, y, z, v; C(x, y) | C(y, z) | C(z, v) | C(v, x)").unwrap();
    let t = derive_with(&g, &ps, &[Some(0); 4]).unwrap();
    let e = expected(
        "nodes x, y, z, v; C(x, y) | C(y, z) | C(z, v) | C(v, x)",
        "x: r<w>, y: r<w>, z: r<w>, v: r<w>",
        "nodes x, y, z, v, w; S(x, w) | S(y, w) | S(z, w) | S(v, w)",
    );
    assert!(pinned_equal(&t, &e));
}

#[test]
fn all_idle_is_the_identity() {
    let ps = prods(&[SPLIT]);
    let g = parse_graph("nodes x, y, u; C(x, y) | C(y, x)").unwrap();
    let t = derive_with(&g, &ps, &[None, None]).unwrap();
    assert!(t.target.congruent(&g));
    assert!(t.label.lambda.values().all(Act::is_eps));
}

#[test]
fn hoare_violation_blocks() {
    let ps = prods(&[SPLIT, STAR]);
    let g = parse_graph("nodes x, y; C(x, y) | C(y, x)").unwrap();
    let err = derive_with(&g, &ps, &[Some(1), None]).unwrap_err();
    assert!(matches!(err, DeriveError::HoareViolation { .. }));
    let arity = prods(&["C(x, y) --[x: r<w v>, y: r<w v>]--> nodes +w, +v; S(w, v)"]);
    let mixed: Vec<Arc<Production>> = vec![ps[1].clone(), arity[0].clone()];
    let err = derive_with(&g, &mixed, &[Some(0), Some(1)]).unwrap_err();
    assert!(matches!(err, DeriveError::ArityMismatch { .. }));
}

#[test]
fn enumeration_of_the_one_element_ring() {
    let ps = prods(&[SPLIT]);
    let g = parse_graph("nodes x; C(x, x)").unwrap();
    let en = enumerate_transitions(&g, &ps, &admit_all, EnumOptions::default());
    assert_eq!(en.transitions.len(), 2);
    assert!(!en.incomplete);
    let split = derive_with(&g, &ps, &[Some(0)]).unwrap();
    let idle = derive_with(&g, &ps, &[None]).unwrap();
    for t in [split, idle] {
        assert!(en.transitions.iter().any(|u| pinned_equal(u, &t)));
    }
}

#[test]
fn empty_graph_only_idles() {
    let g = parse_graph("nodes a; nil").unwrap();
    let en = enumerate_transitions(&g, &prods(&[SPLIT]), &admit_all, EnumOptions::default());
    assert_eq!(en.transitions.len(), 1);
    assert!(en.transitions[0].target.congruent(&g));
}

#[test]
fn enumeration_of_the_four_ring_contains_the_star() {
    let ps = prods(&[SPLIT, STAR]);
    let g = parse_graph("nodes x, y, z, v; C(x, y) | C(y, z) | C(z, v) | C(v, x)").unwrap();
    let en = enumerate_transitions(&g, &ps, &admit_all, EnumOptions::default());
    // Splits on any subset of edges, plus the synchronized star.
    assert_eq!(en.transitions.len(), 17);
    let star = derive_with(&g, &ps, &[Some(1); 4]).unwrap();
    assert!(en.transitions.iter().any(|u| pinned_equal(u, &star)));
}

#[test]
fn derivation_is_deterministic_up_to_renaming() {
    let ps = prods(&[SPLIT, STAR]);
    let g = parse_graph("nodes x, y, z, v; C(x, y) | C(y, z) | C(z, v) | C(v, x)").unwrap();
    let choice = vec![Choice::Use(ps[1].clone()); 4];
    let a = derive_transition(&g, &choice, &BTreeMap::new(), DeriveOptions { fresh_seed: 0 }).unwrap();
    let b = derive_transition(&g, &choice, &BTreeMap::new(), DeriveOptions { fresh_seed: 17 }).unwrap();
    assert_ne!(a.target.nodes, b.target.nodes);
    assert!(transitions_equal_up_to_renaming(&a, &b));
    assert!(pinned_equal(&a, &b));
}

#[test]
fn renaming_a_transition() {
    let ps = prods(&[STAR]);
    let t = ps[0].as_transition();
    let id = rename_transition(&t, &BTreeMap::new()).unwrap();
    assert!(pinned_equal(&id, &t));
    let swap: BTreeMap<Name, Name> = [(n("x"), n("y")), (n("y"), n("x"))].into_iter().collect();
    let s = rename_transition(&t, &swap).unwrap();
    assert_eq!(s.source.edges[0].att, vec![n("y"), n("x")]);
    assert_eq!(s.target.edges[0].att, vec![n("x"), n("w")]);
    assert!(transitions_equal_up_to_renaming(&s, &t));
    let merge: BTreeMap<Name, Name> = [(n("x"), n("y"))].into_iter().collect();
    assert!(rename_transition(&t, &merge).is_err());
}

#[test]
fn fusion_in_a_production_reaches_the_label() {
    let ps = prods(&["C(x, y) --[; y/x]--> nil", SPLIT]);
    let g = parse_graph("nodes a, b, c; C(a, b) | C(b, c)").unwrap();
    let t = derive_with(&g, &ps, &[Some(0), None]).unwrap();
    assert_eq!(t.label.pi_of(&n("b")), n("a"));
    assert_eq!(t.target.edges.len(), 1);
    assert_eq!(t.target.edges[0].att[0], n("a"));
    t.check().unwrap();
}

#[test]
fn text_round_trip() {
    let src = format!("nodes u, x, y; C(x, y) | C(y, x)\n{SPLIT}\n{STAR}\n");
    let file = parse_hg_file(&src).unwrap();
    let printed = print_hg_file(file.graph.as_ref(), &file.productions);
    let again = parse_hg_file(&printed).unwrap();
    assert!(again.graph.unwrap().congruent(file.graph.as_ref().unwrap()));
    assert_eq!(again.productions, file.productions);
    assert!(parse_hg_file("C(x, x) --[]--> nil").is_err());
}

#[test]
fn congruence_ignores_edge_order() {
    let a = parse_graph("nodes a; C(a, b) | S(b, c) | C(c, a)").unwrap();
    let b = parse_graph("S(b, c) | C(c, a) | C(a, b)").unwrap();
    assert!(graph_congruent(&a, &b));
    let c = parse_graph("S(b, c) | C(c, a) | C(b, a)").unwrap();
    assert!(!graph_congruent(&a, &c));
}

#[test]
fn dot_export_is_bipartite() {
    let g = parse_graph("nodes x; C(x, x)").unwrap();
    let d = to_dot(&g, "ring");
    assert!(d.contains("shape=box"));
    assert!(d.contains("\"n_x\" [label=\"x\"]"));
    assert_eq!(d.matches(" -- ").count(), 2);
}
