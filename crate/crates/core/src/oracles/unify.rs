use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::name::Name;
use crate::term::{compose, mgu_plain, EquationSet, Substitution, Term};

/// Largest name pool accepted by [`brute_unify`].
pub const MAX_POOL: usize = 6;
/// Deepest candidate image and equation term accepted by [`brute_unify`].
pub const MAX_DEPTH: usize = 2;
/// Largest number of candidate substitutions tried.
pub const MAX_CANDIDATES: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundExceeded {
    #[error("pool of {0} names exceeds {MAX_POOL}")]
    Pool(usize),
    #[error("depth {0} exceeds {MAX_DEPTH}")]
    Depth(usize),
    #[error("{0} candidate substitutions exceed {MAX_CANDIDATES}")]
    Candidates(usize),
}

type Map = BTreeMap<Name, Term>;

/// Nesting depth of function symbols; variables and constants have depth 0.
fn depth(t: &Term) -> usize {
    match t {
        Term::Var(_) => 0,
        Term::App(_, args) if args.is_empty() => 0,
        Term::App(_, args) => 1 + args.iter().map(depth).max().unwrap_or(0),
    }
}

fn vars_into(t: &Term, out: &mut BTreeSet<Name>) {
    match t {
        Term::Var(x) => {
            out.insert(x.clone());
        }
        Term::App(_, args) => args.iter().for_each(|a| vars_into(a, out)),
    }
}

fn signature_into(t: &Term, out: &mut BTreeSet<(String, usize)>) {
    if let Term::App(f, args) = t {
        out.insert((f.to_string(), args.len()));
        args.iter().for_each(|a| signature_into(a, out));
    }
}

fn apply(m: &Map, t: &Term) -> Term {
    match t {
        Term::Var(x) => m.get(x).cloned().unwrap_or_else(|| t.clone()),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| apply(m, a)).collect()),
    }
}

fn to_map(s: &Substitution) -> Map {
    s.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
}

fn from_map(m: &Map) -> Substitution {
    Substitution::from_pairs(m.iter().map(|(k, v)| (k.clone(), v.clone())))
}

/// Number of terms [`terms_up_to`] returns, saturating.
fn count_terms(pool: usize, sig: &BTreeSet<(String, usize)>, d: usize) -> usize {
    let base = pool + sig.iter().filter(|(_, k)| *k == 0).count();
    let mut n = base;
    for _ in 0..d {
        n = sig
            .iter()
            .filter(|(_, k)| *k > 0)
            .fold(base, |acc, (_, k)| acc.saturating_add(n.checked_pow(*k as u32).unwrap_or(usize::MAX)));
    }
    n
}

/// Terms over `pool` and the function symbols of `sig`, of depth at most `d`.
fn terms_up_to(pool: &[Name], sig: &BTreeSet<(String, usize)>, d: usize) -> Vec<Term> {
    let mut levels: Vec<Term> = pool.iter().cloned().map(Term::Var).collect();
    for (f, _) in sig.iter().filter(|(_, k)| *k == 0) {
        levels.push(Term::app(f, Vec::new()));
    }
    for _ in 0..d {
        let prev = levels.clone();
        let mut next = prev.clone();
        for (f, k) in sig.iter().filter(|(_, k)| *k > 0) {
            let mut tuples: Vec<Vec<Term>> = vec![Vec::new()];
            for _ in 0..*k {
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| prev.iter().map(move |a| [t.clone(), vec![a.clone()]].concat()))
                    .collect();
            }
            for args in tuples {
                let t = Term::app(f, args);
                if !next.contains(&t) {
                    next.push(t);
                }
            }
        }
        levels = next;
    }
    levels
}

/// Every unifier of `eqs` whose images are terms over `pool` of depth at
/// most `image_depth`, built from the function symbols of `eqs`. The domain
/// is exactly the variables of `eqs`.
pub fn brute_unify(eqs: &EquationSet, pool: &[Name], image_depth: usize) -> Result<Vec<Substitution>, BoundExceeded> {
    if pool.len() > MAX_POOL {
        return Err(BoundExceeded::Pool(pool.len()));
    }
    let deepest = eqs.iter().flat_map(|(a, b)| [depth(a), depth(b)]).max().unwrap_or(0).max(image_depth);
    if deepest > MAX_DEPTH {
        return Err(BoundExceeded::Depth(deepest));
    }
    let mut vars = BTreeSet::new();
    let mut sig = BTreeSet::new();
    for (a, b) in eqs {
        vars_into(a, &mut vars);
        vars_into(b, &mut vars);
        signature_into(a, &mut sig);
        signature_into(b, &mut sig);
    }
    let vars: Vec<Name> = vars.into_iter().collect();
    let total = count_terms(pool.len(), &sig, image_depth).checked_pow(vars.len() as u32).unwrap_or(usize::MAX);
    if total > MAX_CANDIDATES {
        return Err(BoundExceeded::Candidates(total));
    }
    let cands = terms_up_to(pool, &sig, image_depth);
    debug_assert_eq!(cands.len(), count_terms(pool.len(), &sig, image_depth));
    let mut out = Vec::new();
    let mut idx = vec![0usize; vars.len()];
    loop {
        let m: Map = vars.iter().cloned().zip(idx.iter().map(|&i| cands[i].clone())).collect();
        if eqs.iter().all(|(a, b)| apply(&m, a) == apply(&m, b)) {
            out.push(from_map(&m));
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(out);
            }
            idx[k] += 1;
            if idx[k] < cands.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Outcome of comparing `mgu` with [`brute_unify`] on one equation set.
#[derive(Clone, Debug, Serialize)]
pub struct UnifyVerdict {
    pub equations: String,
    pub mgu: Option<String>,
    pub brute_unifiers: usize,
    pub failure: Option<String>,
}

/// Checks that `mgu` fails exactly when no unifier exists within the bound
/// (one direction only, since the bound may hide deep unifiers), that its
/// result is an idempotent unifier, and that every brute-force unifier
/// factors through it.
pub fn check_mgu(eqs: &EquationSet, pool: &[Name], image_depth: usize) -> Result<UnifyVerdict, BoundExceeded> {
    let brute = brute_unify(eqs, pool, image_depth)?;
    let text: Vec<String> = eqs.iter().map(|(a, b)| format!("{a} = {b}")).collect();
    let mut verdict =
        UnifyVerdict { equations: text.join(", "), mgu: None, brute_unifiers: brute.len(), failure: None };
    match mgu_plain(eqs) {
        Err(e) => {
            if !brute.is_empty() {
                verdict.failure = Some(format!("mgu failed ({e}) but {} is a unifier", brute[0]));
            }
        }
        Ok(theta) => {
            verdict.mgu = Some(theta.to_string());
            let t = to_map(&theta);
            if !eqs.iter().all(|(a, b)| apply(&t, a) == apply(&t, b)) {
                verdict.failure = Some("mgu result does not unify".into());
            } else if !t.values().all(|img| {
                let mut vs = BTreeSet::new();
                vars_into(img, &mut vs);
                vs.iter().all(|v| !t.contains_key(v))
            }) {
                verdict.failure = Some("mgu result is not idempotent".into());
            } else if let Some(s) = brute.iter().find(|s| !factors_through(&to_map(s), &t)) {
                verdict.failure = Some(format!("unifier {s} is not an instance of the mgu"));
            }
        }
    }
    Ok(verdict)
}

/// `sigma = theta; delta` for some `delta`. For idempotent `theta` the
/// witness is `sigma` itself, so it is enough to check `sigma ∘ theta`.
fn factors_through(sigma: &Map, theta: &Map) -> bool {
    let mut dom: BTreeSet<Name> = sigma.keys().cloned().collect();
    dom.extend(theta.keys().cloned());
    dom.iter().all(|x| {
        let v = Term::Var(x.clone());
        apply(sigma, &apply(theta, &v)) == apply(sigma, &v)
    })
}

const UNIFY_VARS: [&str; 3] = ["x", "y", "z"];

fn random_term(rng: &mut impl Rng, vars: &[Name], d: usize) -> Term {
    let leaf = d == 0 || rng.gen_bool(0.45);
    if leaf {
        if rng.gen_bool(0.1) {
            return Term::app("c", Vec::new());
        }
        return Term::Var(vars[rng.gen_range(0..vars.len())].clone());
    }
    if rng.gen_bool(0.5) {
        Term::app("f", vec![random_term(rng, vars, d - 1)])
    } else {
        Term::app("g", vec![random_term(rng, vars, d - 1), random_term(rng, vars, d - 1)])
    }
}

/// A random set of one to three equations over `x, y, z` with terms of
/// depth at most two built from `c/0`, `f/1` and `g/2`.
pub fn random_equations(rng: &mut impl Rng) -> EquationSet {
    let nv = rng.gen_range(1..=UNIFY_VARS.len());
    let vars: Vec<Name> = UNIFY_VARS[..nv].iter().map(|s| Name::user(s)).collect();
    (0..rng.gen_range(1..=3)).map(|_| (random_term(rng, &vars, 2), random_term(rng, &vars, 2))).collect()
}

/// Pool and image depth keeping the brute-force search small: two pool
/// names with images of depth one, or one name with images of depth two
/// when the set has at most two variables. Pool names never occur in the
/// equations.
pub fn brute_bounds_for(eqs: &EquationSet) -> (Vec<Name>, usize) {
    let mut vars = BTreeSet::new();
    for (a, b) in eqs {
        vars_into(a, &mut vars);
        vars_into(b, &mut vars);
    }
    if vars.len() <= 2 {
        (vec![Name::user("p")], 2)
    } else {
        (vec![Name::user("p"), Name::user("q")], 1)
    }
}

const SUBST_VARS: [&str; 4] = ["x", "y", "z", "w"];

/// A random idempotent substitution over `x, y, z, w`: images avoid the
/// domain and are variables or terms of depth one.
pub fn random_idempotent(rng: &mut impl Rng) -> Substitution {
    let all: Vec<Name> = SUBST_VARS.iter().map(|s| Name::user(s)).collect();
    let dom: Vec<Name> = all.iter().filter(|_| rng.gen_bool(0.45)).cloned().collect();
    let rest: Vec<Name> = all.iter().filter(|n| !dom.contains(n)).cloned().collect();
    if rest.is_empty() {
        return Substitution::new();
    }
    let mut m = Map::new();
    for x in dom {
        let t = random_term(rng, &rest, 1);
        m.insert(x, t);
    }
    from_map(&m)
}

fn eqn_of(s: &Substitution) -> EquationSet {
    s.iter().map(|(x, t)| (Term::Var(x.clone()), t.clone())).collect()
}

/// `mgu(eqn(t1) ∪ eqn(t2)) = t1 · mgu(eqn(t2) t1)` up to the choice of
/// representatives: both sides fail together, or both unify the union and
/// each is an instance of the other.
pub fn check_mgu_composition(t1: &Substitution, t2: &Substitution) -> Result<(), String> {
    let mut union = eqn_of(t1);
    union.extend(eqn_of(t2));
    let m1 = to_map(t1);
    let pushed: EquationSet = eqn_of(t2).into_iter().map(|(a, b)| (apply(&m1, &a), apply(&m1, &b))).collect();
    let lhs = mgu_plain(&union);
    let rhs = mgu_plain(&pushed).map(|s| compose(t1, &s));
    match (lhs, rhs) {
        (Err(_), Err(_)) => Ok(()),
        (Ok(l), Err(e)) => Err(format!("left side {l} exists, right side fails: {e}")),
        (Err(e), Ok(r)) => Err(format!("right side {r} exists, left side fails: {e}")),
        (Ok(l), Ok(r)) => {
            let (lm, rm) = (to_map(&l), to_map(&r));
            if !union.iter().all(|(a, b)| apply(&rm, a) == apply(&rm, b)) {
                return Err(format!("right side {r} does not unify the union"));
            }
            let idempotent = rm.values().all(|img| {
                let mut vs = BTreeSet::new();
                vars_into(img, &mut vs);
                vs.iter().all(|v| !rm.contains_key(v))
            });
            if !idempotent {
                return Err(format!("right side {r} is not idempotent"));
            }
            if factors_through(&rm, &lm) && factors_through(&lm, &rm) {
                Ok(())
            } else {
                Err(format!("{l} and {r} are not instances of each other"))
            }
        }
    }
}
