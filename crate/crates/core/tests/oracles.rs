use fusion_slp::fusion::{alpha_equal, parse_agent, parse_agent_raw};
use fusion_slp::oracles::*;
use fusion_slp::term::mgu_plain;
use fusion_slp::{Name, Substitution, Term};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn v(s: &str) -> Term {
    Term::var(Name::parse(s))
}

fn f(args: Vec<Term>) -> Term {
    Term::app("f", args)
}

const QRS: &str = "(u x y z w)(Q(x,y,z) | 'u<x y>.R(u,x) | u<z w>.S(z,w))";

#[test]
fn brute_unifiers_of_a_variable_equation() {
    let a = Name::parse("a");
    let eqs = vec![(v("x"), v("y"))];
    let all = brute_unify(&eqs, std::slice::from_ref(&a), 0).unwrap();
    let expected =
        Substitution::from_pairs([(Name::parse("x"), Term::var(a.clone())), (Name::parse("y"), Term::var(a))]);
    assert!(all.contains(&expected));
    assert_eq!(all.len(), 1);
}

#[test]
fn a_clash_has_no_brute_unifier() {
    let eqs = vec![(f(vec![v("x")]), Term::app("g", vec![v("y")]))];
    assert!(brute_unify(&eqs, &[Name::parse("p")], 1).unwrap().is_empty());
    let verdict = check_mgu(&eqs, &[Name::parse("p")], 1).unwrap();
    assert!(verdict.mgu.is_none());
    assert!(verdict.failure.is_none());
}

#[test]
fn brute_unify_enforces_its_bounds() {
    let pool: Vec<Name> = (0..7).map(|i| Name::parse(&format!("p{i}"))).collect();
    assert_eq!(brute_unify(&vec![(v("x"), v("y"))], &pool, 0), Err(BoundExceeded::Pool(7)));
    let deep = vec![(v("x"), f(vec![f(vec![f(vec![v("y")])])]))];
    assert!(matches!(brute_unify(&deep, &pool[..1], 0), Err(BoundExceeded::Depth(3))));
    let many = vec![(Term::app("g", vec![v("x"), v("y"), v("z"), v("w")]), v("u"))];
    assert!(matches!(brute_unify(&many, &pool[..6], 2), Err(BoundExceeded::Candidates(_))));
}

#[test]
fn every_brute_unifier_factors_through_the_mgu() {
    let eqs = vec![(f(vec![v("x")]), f(vec![v("y")]))];
    let verdict = check_mgu(&eqs, &[Name::parse("p")], 2).unwrap();
    assert!(verdict.failure.is_none(), "{:?}", verdict.failure);
    assert!(verdict.brute_unifiers > 1);
}

#[test]
fn cyclic_equations_are_rejected_promptly() {
    let x = v("x");
    let eqs = vec![(x.clone(), x.clone()), (x.clone(), f(vec![f(vec![x.clone()])])), (f(vec![x.clone()]), x)];
    assert!(mgu_plain(&eqs).is_err());
    let swap = vec![(v("x"), v("y")), (v("y"), f(vec![v("x")]))];
    assert!(mgu_plain(&swap).is_err());
}

#[test]
fn random_unification_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let eqs = random_equations(&mut rng);
        let (pool, d) = brute_bounds_for(&eqs);
        let verdict = check_mgu(&eqs, &pool, d).unwrap();
        assert!(verdict.failure.is_none(), "{}: {:?}", verdict.equations, verdict.failure);
        let a = random_idempotent(&mut rng);
        let b = random_idempotent(&mut rng);
        assert!(a.is_idempotent());
        check_mgu_composition(&a, &b).unwrap();
    }
}

#[test]
fn process_generation_is_reproducible() {
    let cfg = SweepConfig { max_components: 2, max_arity: 1, max_sum: 1, max_rec_depth: 0, ..SweepConfig::default() };
    let a = gen_processes(&cfg, 20);
    let b = gen_processes(&cfg, 20);
    assert_eq!(a, b);
    assert_eq!(gen_process(&cfg, 5), a[5]);
    let other = gen_processes(&SweepConfig { seed: 1, ..cfg }, 20);
    assert_ne!(a, other);
}

#[test]
fn generated_processes_are_closed_and_print_back() {
    let cfg = SweepConfig::default();
    for p in gen_processes(&cfg, 100) {
        assert!(p.free_names().is_empty(), "{p}");
        assert!(p.free_agent_vars().is_empty(), "{p}");
        assert_eq!(parse_agent_raw(&p.to_string()).unwrap(), p);
        assert!(alpha_equal(&parse_agent(&p.to_string()).unwrap(), &p));
    }
}

#[test]
fn the_three_component_process_passes_the_sweep_check() {
    let v = check_process(0, &parse_agent(QRS).unwrap());
    assert!(v.ok, "{:?}", v.counterexample);
    assert_eq!(v.reductions, 1);
    assert!(v.transitions >= 1);
    assert_eq!(v.big_steps, v.transitions);
}

#[test]
fn a_stuck_process_has_nothing_to_relate() {
    let v = check_process(0, &parse_agent("(u v)(u<>.0 | 'v<>.0)").unwrap());
    assert!(v.ok, "{:?}", v.counterexample);
    assert_eq!((v.reductions, v.transitions, v.big_steps), (0, 0, 0));
}

#[test]
fn small_process_sweep() {
    let r = theorem_sweep(&SweepConfig::default(), 40);
    assert_eq!(r.instances, 40);
    assert_eq!(r.counterexamples, 0, "{:?}", r.verdicts.iter().find(|v| !v.ok));
    assert!(r.reductions > 0);
    let json = serde_json::to_value(&r).unwrap();
    assert_eq!(json["verdicts"].as_array().unwrap().len(), 40);
}

#[test]
fn small_production_set_sweep() {
    let mut visible = 0;
    for seed in 0..30 {
        let v = check_production_set(seed);
        assert!(v.ok, "{}", serde_json::to_string_pretty(&v).unwrap());
        let set = gen_production_set(seed);
        assert!(set.graph.edges.len() <= 3 && !set.graph.edges.is_empty());
        assert!(set.productions.iter().all(|p| p.lhs.att.len() <= 2));
        visible += usize::from(v.transitions > 1);
    }
    assert!(visible > 10);
}

#[test]
fn determinism_and_renaming_lemmas() {
    let mut nontrivial = 0;
    for seed in 0..50 {
        nontrivial += usize::from(check_det(seed).unwrap());
        nontrivial += usize::from(check_injren(seed).unwrap());
    }
    assert!(nontrivial > 20);
}

#[test]
fn structured_amoeboids_with_one_or_two_connectors() {
    let ams = structured_amoeboids(2);
    assert!(ams.iter().any(|g| g.edges.len() == 1 && &*g.edges[0].label == "m2"));
    assert!(ams.iter().any(|g| g.edges.len() == 1 && &*g.edges[0].label == "m3"));
    for m in &ams {
        let verdict = check_amoeboid(m);
        assert!(verdict.ok(), "{}", serde_json::to_string_pretty(&verdict).unwrap());
        assert_eq!(verdict.restricted > 0, verdict.external >= 2);
    }
}
