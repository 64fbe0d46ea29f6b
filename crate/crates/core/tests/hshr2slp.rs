use std::collections::BTreeMap;
use std::sync::Arc;

use fusion_slp::fusion::parse_agent;
use fusion_slp::fusion2hshr::{interleaving_admit, translate_with_productions, ProductionOptions};
use fusion_slp::hshr::{
    admit_all, derive_with, enumerate_transitions, parse_graph, parse_production, Choice, EnumOptions, Production,
};
use fusion_slp::hshr2slp::*;
use fusion_slp::oracles::productions_for_graph;
use fusion_slp::slp::{acting_vars, big_steps_with, observably_equal, parse_goal, BigStepOptions, Goal};
use fusion_slp::{Name, Substitution, Term};

const QRS: &str = "(u x y z w)(Q(x,y,z) | 'u<x y>.R(u,x) | u<z w>.S(z,w))";
const SPLIT: &str = "split: C(x, y) --[]--> nodes +z; C(x, z) | C(z, y)";
const STAR: &str = "star: C(x, y) --[x: r<w>, y: r<w>]--> nodes +w; S(y, w)";

const COMM_START: &str = "\"L{Q(x1, x2, x3)}\"(x1, y1, z1), \"L{'x1<x2 x3>.R(x4, x5)}\"(u1, x2, y2, u2, x3), \
    \"L{x1<x2 x3>.S(x4, x5)}\"(u3, z2, w1, z3, w2), m4(u, u1, u2, u3), m4(x, x1, x2, x3), m3(y, y1, y2), \
    m4(z, z1, z2, z3), m3(w, w1, w2), n(u), n(x), n(y), n(w), n(z)";
const COMM_END: &str = "\"L{Q(x1, x2, x3)}\"(x1, y1, z1), \"L{R(x1, x2)}\"(u2, x3), n(p1), \
    \"L{S(x1, x2)}\"(z3, w2), n(p3), m4(u, p1, u2, p3), m2(x2, z2), m2(y2, w1), m4(x, x1, x2, x3), \
    m3(y, y1, y2), m4(z, z1, z2, z3), m3(w, w1, w2), n(u), n(x), n(y), n(w), n(z)";

fn n(s: &str) -> Name {
    Name::parse(s)
}

fn v(s: &str) -> Term {
    Term::Var(n(s))
}

fn prods(srcs: &[&str]) -> Vec<Arc<Production>> {
    srcs.iter().map(|s| Arc::new(parse_production(s).unwrap())).collect()
}

/// Every way of orienting the `m2` atoms of `g`. Connector tentacles are
/// unordered, and the expected goal lists the bridged vectors output side first
/// while the general auxiliary production lists the input side first.
fn m2_orientations(g: &Goal) -> Vec<Goal> {
    let mut out = vec![g.clone()];
    for (i, a) in g.atoms.iter().enumerate() {
        if &*a.pred != "m2" {
            continue;
        }
        let flipped: Vec<Goal> = out
            .iter()
            .map(|h| {
                let mut h = h.clone();
                h.atoms[i].args.reverse();
                h
            })
            .collect();
        out.extend(flipped);
    }
    out
}

#[test]
fn judgements_translate_to_goal_graphs_and_back() {
    let g = parse_graph("nodes x, y; C(x, y) | C(y, x)").unwrap();
    let goal = translate_judgement(&g);
    assert_eq!(goal.to_string(), "C(x, y), C(y, x)");
    assert!(goal.is_graph());
    let back = goal_to_judgement(&goal).unwrap();
    assert_eq!(back.edges, g.edges);
    let not_graph = Goal::new(vec![fusion_slp::slp::Atom::new("C", vec![Term::app("f", vec![v("x")])])]);
    assert!(goal_to_judgement(&not_graph).is_err());
}

#[test]
fn productions_translate_to_synchronized_clauses() {
    let ps = prods(&[SPLIT, STAR]);
    let program = translate_productions(&ps, ClauseOptions::default()).unwrap();
    assert_eq!(program.clauses[0].to_string(), "split: C(x, y) :- C(x, z), C(z, y).");
    assert_eq!(program.clauses[1].to_string(), "star: C(r(x, w), r(y, w)) :- S(y, w).");
}

#[test]
fn prefix_and_auxiliary_productions_translate() {
    let a = parse_agent(QRS).unwrap();
    let (g, src) = translate_with_productions(&a, ProductionOptions::default()).unwrap();
    let ps = productions_for_graph(&g, &src);
    let program = translate_productions(&ps, ClauseOptions::default()).unwrap();
    let out = program.clauses.iter().find(|c| c.name.as_deref() == Some("out1")).unwrap();
    assert_eq!(
        out.to_string(),
        "out1: \"L{'x1<x2 x3>.R(x4, x5)}\"(out2(x1, x2, x3), x2, x3, x4, x5) :- \"L{R(x1, x2)}\"(x4, x5), n(x1)."
    );
    let aux: Vec<_> = program.clauses.iter().filter(|c| &*c.head.pred == "m4").collect();
    assert!(!aux.is_empty());
    let comm_aux = aux
        .iter()
        .find(|c| {
            let heads: Vec<Option<&str>> = c
                .head
                .args
                .iter()
                .map(|t| match t {
                    Term::App(f, _) => Some(&**f),
                    Term::Var(_) => None,
                })
                .collect();
            heads == [None, Some("out2"), None, Some("in2")]
        })
        .expect("an m4 clause synchronizing out2 at the second and in2 at the fourth tentacle");
    assert_eq!(comm_aux.body.len(), 3);
    assert_eq!(comm_aux.body.atoms.iter().filter(|b| &*b.pred == "m2").count(), 2);
}

#[test]
fn unsynchronized_productions_need_the_foo_convention() {
    let p = parse_production("drop: C(x, y) --[]--> nodes x, y; D(x)").unwrap();
    let err = translate_production(&p, ClauseOptions::default()).unwrap_err();
    assert_eq!(err.violations.len(), 1);
    let c = translate_production(&p, ClauseOptions { foo_convention: true }).unwrap();
    assert_eq!(c.to_string(), "drop: C(x, foo(y)) :- D(x).");
}

#[test]
fn associated_substitution_of_the_star_step() {
    let ps = prods(&[STAR]);
    let g = parse_graph("nodes a, b; C(a, b) | C(b, a)").unwrap();
    let t = derive_with(&g, &ps, &[Some(0), Some(0)]).unwrap();
    let hub = t.target.nodes.difference(&g.nodes).next().unwrap().clone();
    let rho: BTreeMap<Name, Name> = [(n("a"), n("a1")), (n("b"), n("b1")), (hub.clone(), n("h"))].into_iter().collect();
    let assoc = associated_substitution(&t, Some(&rho)).unwrap();
    let mut expected = Substitution::new();
    expected.insert(n("a"), Term::app("r", vec![v("a1"), v("h")]));
    expected.insert(n("b"), Term::app("r", vec![v("b1"), v("h")]));
    assert_eq!(assoc.theta, expected);

    let clash: BTreeMap<Name, Name> = [(n("a"), n("h")), (n("b"), n("h"))].into_iter().collect();
    assert!(associated_substitution(&t, Some(&clash)).is_err());
    let canonical = associated_substitution(&t, None).unwrap();
    assert_eq!(canonical.rho, canonical_rho(&t));
    assert!(canonical.rho.values().all(|m| !g.nodes.contains(m)));
}

#[test]
fn the_communication_big_step_is_reproduced() {
    let a = parse_agent(QRS).unwrap();
    let (g, src) = translate_with_productions(&a, ProductionOptions::default()).unwrap();
    let ps = productions_for_graph(&g, &src);
    let program = translate_productions(&ps, ClauseOptions::default()).unwrap();
    let start = parse_goal(COMM_START).unwrap();
    assert!(fusion_slp::fusion2hshr::graphs_equal_up_to_renaming(&goal_to_judgement(&start).unwrap(), &g));

    let admit = |sel: &[Option<usize>], complete: bool| {
        let ch = choices_for(sel, &ps);
        let partial: Vec<Option<&Choice>> = ch.iter().map(Some).collect();
        interleaving_admit(&partial, complete)
    };
    let opts = BigStepOptions { nonempty: true, ..BigStepOptions::default() };
    let bs = big_steps_with(&start, &program, None, &admit, opts).unwrap();
    assert_eq!(bs.len(), 1);
    let b = &bs[0];
    assert_eq!(acting_vars(b), [n("u1"), n("u3")].into());

    let mut theta = Substitution::new();
    theta.insert(n("u1"), Term::app("out2", vec![v("p1"), v("x2"), v("y2")]));
    theta.insert(n("u3"), Term::app("in2", vec![v("p3"), v("z2"), v("w1")]));
    let end = parse_goal(COMM_END).unwrap();
    let found = m2_orientations(&end).iter().any(|e| observably_equal(&start.vars(), (&b.theta, &b.end), (&theta, e)));
    assert!(found, "{} / {}", b.theta, b.end);
    assert_eq!(b.trace.len(), 3);
}

#[test]
fn correspondence_on_the_ring() {
    let ps = prods(&[SPLIT, STAR]);
    let g = parse_graph("nodes x, y; C(x, y) | C(y, x)").unwrap();
    let en = enumerate_transitions(&g, &ps, &admit_all, EnumOptions::default());
    assert!(!en.transitions.is_empty());
    for t in &en.transitions {
        let r = check_correspondence(t, &ps);
        assert!(r.passed(), "{t}: {:?}", r.counterexample);
        assert_eq!(r.witness.unwrap().selection, selection_for(t, &ps).unwrap());
    }
}

#[test]
fn the_idle_transition_corresponds_to_the_empty_big_step() {
    let ps = prods(&[SPLIT]);
    let g = parse_graph("nodes x; C(x, x)").unwrap();
    let t = derive_with(&g, &ps, &[None]).unwrap();
    let r = check_correspondence(&t, &ps);
    assert!(r.passed());
    let w = r.witness.unwrap();
    assert_eq!(w.selection, vec![None]);
    assert!(w.theta.is_empty());
    assert_eq!(r.big_steps, 2);
}

#[test]
fn foreign_transitions_have_no_selection() {
    let ps = prods(&[SPLIT]);
    let g = parse_graph("nodes x; C(x, x)").unwrap();
    let t = derive_with(&g, &prods(&[STAR]), &[Some(0)]).unwrap();
    assert!(selection_for(&t, &ps).is_none());
    assert!(!check_correspondence(&t, &ps).passed());
}
