use std::collections::BTreeSet;

use fusion_slp::slp::*;
use fusion_slp::{FreshGen, Name, Substitution, Term};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn clause(src: &str) -> Clause {
    let p = parse_program(src).unwrap();
    assert_eq!(p.clauses.len(), 1);
    p.clauses[0].clone()
}

#[test]
fn synchronized_clause_table() {
    assert!(validate_clause(&clause("q(f(x), y) :- p(x, y).")).is_empty());
    assert!(matches!(
        validate_clause(&clause("q(f(x), y) :- p(x, f(y)).")).as_slice(),
        [Violation::BodyFunction { atom: 1, arg: 2, .. }]
    ));
    assert!(matches!(
        validate_clause(&clause("q(g(f(x)), y) :- p(x, y).")).as_slice(),
        [Violation::Nested { arg: 1, .. }]
    ));
    let v = validate_clause(&clause("q(f(x), y, f(z)) :- p(x)."));
    assert_eq!(v, vec![Violation::HeadVarNotInBody { arg: 2, var: Name::parse("y") }]);
    assert!(validate_clause(&clause("q(f(x), f(z)) :- p(x).")).is_empty());
}

#[test]
fn head_variables_inside_actions_count_as_synchronized() {
    assert!(is_synchronized(&clause("l(out2(x1, x2, x3), x2, x3) :- r(x1).")));
    assert!(matches!(validate_clause(&clause("q(c()) :- p.")).as_slice(), [Violation::Constant { arg: 1, .. }]));
    assert!(matches!(
        validate_clause(&clause("q(f(c())) :- p.")).as_slice(),
        [Violation::NonVariableArgument { arg: 1, .. }]
    ));
}

#[test]
fn text_round_trip() {
    let src = "split: C(x, y) :- C(x, z), C(z, y).\nstar: C(r(x, w), r(y, w)) :- S(y, w).\nunit: D(x).\n?- C(a, b), C(b, a).\n?- .\n";
    let f = parse_slp(src).unwrap();
    assert_eq!(f.to_string(), src);
    assert_eq!(parse_slp(&f.to_string()).unwrap(), f);
    assert_eq!(f.goals[1], Goal::default());
    assert_eq!(f.goals[1].to_string(), "□");
}

#[test]
fn queries_are_goal_graphs() {
    assert!(matches!(parse_slp("?- p(f(x))."), Err(SlpParseError::FunctionInGoal { .. })));
    assert!(matches!(parse_slp("?- p(c())."), Err(SlpParseError::ConstantInGoal { .. })));
    assert!(parse_goal("p(f(x))").is_err());
    assert!(parse_slp("p(x) :- q(x)").is_err());
}

#[test]
fn resolving_with_a_unit_clause() {
    let program = parse_program("p(x).").unwrap();
    let goal = parse_goal("p(a), q(a)").unwrap();
    let mut gen = FreshGen::avoiding(goal.vars().iter().chain(program.vars().iter()));
    let step = sld_step(&goal, &program, 0, 0, &mut gen).unwrap();
    assert!(step.theta.is_renaming());
    assert!(step.theta.restrict(&goal.vars()).is_empty());
    assert_eq!(step.next, parse_goal("q(a)").unwrap());
}

#[test]
fn resolving_against_another_predicate_fails() {
    let program = parse_program("p(x).").unwrap();
    let goal = parse_goal("q(a)").unwrap();
    let mut gen = FreshGen::new();
    assert!(matches!(sld_step(&goal, &program, 0, 0, &mut gen), Err(SldError::PredicateMismatch { .. })));
    assert!(matches!(sld_step(&goal, &program, 1, 0, &mut gen), Err(SldError::NoAtom(1))));
    assert!(matches!(sld_step(&goal, &program, 0, 3, &mut gen), Err(SldError::NoClause(3))));
}

#[test]
fn the_empty_selection_gives_the_empty_big_step() {
    let program = parse_program("split: C(x, y) :- C(x, z), C(z, y).").unwrap();
    let start = parse_goal("C(a, a)").unwrap();
    let b = big_step_for(&start, &program, &[None]).unwrap().unwrap();
    assert!(b.is_empty());
    assert!(b.theta.is_empty());
    assert_eq!(b.end, start);
    assert!(b.trace.is_empty());
    let all = big_steps(&start, &program, None, BigStepOptions::default()).unwrap();
    assert_eq!(all.len(), 2);
    let nonempty = big_steps(&start, &program, None, BigStepOptions { nonempty: true, ..Default::default() }).unwrap();
    assert_eq!(nonempty.len(), 1);
    assert_eq!(nonempty[0].end.len(), 2);
}

#[test]
fn synchronization_requires_agreeing_actions() {
    let program = parse_program("l: A(r(x)) :- B(x).\nm: A(s(x)) :- B(x).").unwrap();
    let start = parse_goal("A(a), A(a)").unwrap();
    assert!(big_step_for(&start, &program, &[Some(0), Some(1)]).unwrap().is_none());
    assert!(big_step_for(&start, &program, &[Some(0), None]).unwrap().is_none());
    let b = big_step_for(&start, &program, &[Some(0), Some(0)]).unwrap().unwrap();
    assert_eq!(acting_vars(&b), [Name::parse("a")].into());
    let all = big_steps(&start, &program, None, BigStepOptions::default()).unwrap();
    assert_eq!(all.len(), 3);
}

#[test]
fn nested_observable_bindings_are_rejected() {
    let program = parse_program("l: A(f(x)) :- B(x).\nm: C(y) :- D(y).").unwrap();
    let start = parse_goal("A(a)").unwrap();
    assert!(big_step_for(&start, &program, &[Some(0)]).unwrap().is_some());
    let chained = parse_program("l: A(f(x), x) :- B(x).\nm: A(y, g(y)) :- B(y).").unwrap();
    let start = parse_goal("A(a, b), A(a, b)").unwrap();
    assert!(replay(&start, &chained, &[Some(0), Some(1)]).is_none());
    assert!(closed_form(&start, &chained, &[Some(0), Some(1)]).is_none());
}

#[test]
fn observable_equality_ignores_fresh_names_only() {
    let keep: BTreeSet<Name> = [Name::parse("a")].into();
    let mut s1 = Substitution::new();
    s1.insert(Name::parse("a"), Term::app("r", vec![Term::var(Name::parse("p"))]));
    let mut s2 = Substitution::new();
    s2.insert(Name::parse("a"), Term::app("r", vec![Term::var(Name::parse("q"))]));
    let g1 = parse_goal("B(p)").unwrap();
    let g2 = parse_goal("B(q)").unwrap();
    assert!(observably_equal(&keep, (&s1, &g1), (&s2, &g2)));
    let g3 = parse_goal("B(a)").unwrap();
    assert!(!observably_equal(&keep, (&s1, &g1), (&s2, &g3)));
}

const PREDS: [(&str, usize); 3] = [("p", 1), ("q", 2), ("s", 2)];
const ACTS: [(&str, usize); 2] = [("f", 1), ("g", 2)];

fn random_clause(rng: &mut ChaCha8Rng) -> Clause {
    let (pred, k) = PREDS[rng.gen_range(0..PREDS.len())];
    let pool: Vec<Name> = ["x", "y", "z", "w"].iter().map(|s| Name::parse(s)).collect();
    let head: Vec<Term> = (0..k)
        .map(|_| {
            if rng.gen_bool(0.5) {
                let (f, n) = ACTS[rng.gen_range(0..ACTS.len())];
                Term::app(f, (0..n).map(|_| Term::Var(pool.choose(rng).unwrap().clone())).collect())
            } else {
                Term::Var(pool.choose(rng).unwrap().clone())
            }
        })
        .collect();
    let body: Vec<Atom> = (0..rng.gen_range(0..=2))
        .map(|_| {
            let (p, n) = PREDS[rng.gen_range(0..PREDS.len())];
            Atom::of_names(p, &(0..n).map(|_| pool.choose(rng).unwrap().clone()).collect::<Vec<_>>())
        })
        .collect();
    Clause::new(Atom::new(pred, head), Goal::new(body))
}

fn random_instance(seed: u64) -> (Goal, Program) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clauses = Vec::new();
    while clauses.len() < 3 {
        let c = random_clause(&mut rng);
        if is_synchronized(&c) {
            clauses.push(c);
        }
    }
    let vars: Vec<Name> = ["a", "b", "c"].iter().map(|s| Name::parse(s)).collect();
    let atoms = (0..rng.gen_range(1..=3))
        .map(|_| {
            let (p, n) = PREDS[rng.gen_range(0..PREDS.len())];
            Atom::of_names(p, &(0..n).map(|_| vars.choose(&mut rng).unwrap().clone()).collect::<Vec<_>>())
        })
        .collect();
    (Goal::new(atoms), Program::new(clauses))
}

fn selections(start: &Goal, program: &Program) -> Vec<Vec<Option<usize>>> {
    let mut out: Vec<Vec<Option<usize>>> = vec![Vec::new()];
    for a in &start.atoms {
        let options: Vec<Option<usize>> =
            std::iter::once(None).chain(program.candidates(a).into_iter().map(Some)).collect();
        out = out.iter().flat_map(|s| options.iter().map(move |o| [s.clone(), vec![*o]].concat())).collect();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closed_form_agrees_with_replay(seed in any::<u64>()) {
        let (start, program) = random_instance(seed);
        for sel in selections(&start, &program) {
            let closed = closed_form(&start, &program, &sel);
            let replayed = replay(&start, &program, &sel);
            prop_assert_eq!(closed.is_some(), replayed.is_some(), "{} with {:?}", start, sel);
            if let (Some((t1, e1)), Some(r)) = (closed, replayed) {
                prop_assert!(observably_equal(&start.vars(), (&t1, &e1), (&r.theta, &r.end)));
                prop_assert!(r.end.is_graph());
            }
        }
    }

    #[test]
    fn replay_order_does_not_matter(seed in any::<u64>()) {
        let (start, program) = random_instance(seed);
        let n = start.len();
        let forward: Vec<usize> = (0..n).collect();
        let backward: Vec<usize> = (0..n).rev().collect();
        for sel in selections(&start, &program) {
            let a = replay_in_order(&start, &program, &sel, &forward);
            let b = replay_in_order(&start, &program, &sel, &backward);
            prop_assert_eq!(a.is_some(), b.is_some());
            if let (Some(a), Some(b)) = (a, b) {
                prop_assert!(observably_equal(&start.vars(), (&a.theta, &a.end), (&b.theta, &b.end)));
            }
        }
    }

    #[test]
    fn enumeration_is_deterministic(seed in any::<u64>()) {
        let (start, program) = random_instance(seed);
        let a = big_steps(&start, &program, None, BigStepOptions::default()).unwrap();
        let b = big_steps(&start, &program, None, BigStepOptions::default()).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(&x.selection, &y.selection);
            prop_assert_eq!(x.theta.to_string(), y.theta.to_string());
            prop_assert_eq!(x.end.to_string(), y.end.to_string());
        }
        prop_assert!(a.iter().any(BigStep::is_empty));
    }
}
