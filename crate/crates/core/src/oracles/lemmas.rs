use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::prodgen::{gen_production_set, ProductionSet};
use crate::hshr::{
    derive_transition, rename_transition, transition_renaming, Act, Choice, DeriveOptions, Judgement, Transition,
};
use crate::name::Name;

type Ren = BTreeMap<Name, Name>;

fn ren(r: &Ren, x: &Name) -> Name {
    r.get(x).cloned().unwrap_or_else(|| x.clone())
}

fn edge_multiset(g: &Judgement, r: &Ren) -> Vec<(String, Vec<Name>)> {
    let mut v: Vec<(String, Vec<Name>)> =
        g.edges.iter().map(|e| (e.label.to_string(), e.att.iter().map(|x| ren(r, x)).collect())).collect();
    v.sort();
    v
}

fn act_of(t: &Transition, x: &Name) -> Act {
    t.label.lambda.get(x).cloned().unwrap_or(Act::Eps)
}

fn pi_of(t: &Transition, x: &Name) -> Name {
    t.label.pi.get(x).cloned().unwrap_or_else(|| x.clone())
}

fn names_of(t: &Transition) -> BTreeSet<Name> {
    let mut s: BTreeSet<Name> = t.source.nodes.iter().chain(&t.target.nodes).cloned().collect();
    for g in [&t.source, &t.target] {
        s.extend(g.edges.iter().flat_map(|e| e.att.iter().cloned()));
    }
    for a in t.label.lambda.values() {
        if let Act::Do(_, ys) = a {
            s.extend(ys.iter().cloned());
        }
    }
    s
}

/// Checks that `r` is injective and carries `a` onto `b`: sources, actions
/// on non-isolated source nodes, fusions and targets.
pub fn verify_renaming(a: &Transition, b: &Transition, r: &Ren) -> Result<(), String> {
    let names = names_of(a);
    let images: BTreeSet<Name> = names.iter().map(|x| ren(r, x)).collect();
    if images.len() != names.len() {
        return Err("renaming is not injective".into());
    }
    let map_set = |s: &BTreeSet<Name>| s.iter().map(|x| ren(r, x)).collect::<BTreeSet<_>>();
    if map_set(&a.source.nodes) != b.source.nodes
        || edge_multiset(&a.source, r) != edge_multiset(&b.source, &Ren::new())
    {
        return Err("sources differ".into());
    }
    let attached: BTreeSet<Name> = a.source.edges.iter().flat_map(|e| e.att.iter().cloned()).collect();
    for x in &attached {
        let mapped = match act_of(a, x) {
            Act::Eps => Act::Eps,
            Act::Do(s, ys) => Act::Do(s, ys.iter().map(|y| ren(r, y)).collect()),
        };
        if mapped != act_of(b, &ren(r, x)) {
            return Err(format!("actions differ at {x}"));
        }
    }
    for x in &a.source.nodes {
        if ren(r, &pi_of(a, x)) != pi_of(b, &ren(r, x)) {
            return Err(format!("fusions differ at {x}"));
        }
    }
    if map_set(&a.target.nodes) != b.target.nodes
        || edge_multiset(&a.target, r) != edge_multiset(&b.target, &Ren::new())
    {
        return Err("targets differ".into());
    }
    Ok(())
}

/// Swaps representatives inside each fused class of `t` so that they agree
/// with those of `like`. Fusions are most general unifiers, so any member of
/// a class may represent it. `None` when the two fusions partition the
/// source nodes differently.
fn adopt_representatives(t: &Transition, like: &Transition) -> Option<Transition> {
    let nodes = &t.source.nodes;
    if *nodes != like.source.nodes {
        return None;
    }
    for x in nodes {
        for y in nodes {
            if (pi_of(t, x) == pi_of(t, y)) != (pi_of(like, x) == pi_of(like, y)) {
                return None;
            }
        }
    }
    let mut swap = Ren::new();
    for x in nodes {
        let (a, b) = (pi_of(t, x), pi_of(like, x));
        if a != b {
            swap.insert(a.clone(), b.clone());
            swap.insert(b, a);
        }
    }
    let f = |n: &Name| ren(&swap, n);
    let lambda = t.label.lambda.iter().map(|(k, a)| (k.clone(), a.rename(&f))).collect();
    let pi = nodes.iter().map(|x| (x.clone(), f(&pi_of(t, x)))).filter(|(k, v)| k != v).collect();
    Some(Transition {
        source: t.source.clone(),
        label: crate::hshr::TransitionLabel { lambda, pi },
        target: t.target.rename(&f),
        provenance: None,
    })
}

fn random_choices(rng: &mut ChaCha8Rng, set: &ProductionSet) -> Vec<Choice> {
    set.graph
        .edges
        .iter()
        .map(|e| {
            let fits: Vec<_> =
                set.productions.iter().filter(|p| p.lhs.label == e.label && p.lhs.att.len() == e.att.len()).collect();
            if fits.is_empty() || rng.gen_bool(0.25) {
                Choice::Idle
            } else {
                Choice::Use((*fits.choose(rng).expect("non-empty")).clone())
            }
        })
        .collect()
}

/// Same graph and choice map derived with two different fresh-name streams
/// give transitions related by an injective renaming that fixes the source.
pub fn check_det(seed: u64) -> Result<bool, String> {
    let set = gen_production_set(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xD37);
    let choices = random_choices(&mut rng, &set);
    let none = BTreeMap::new();
    let t1 = derive_transition(&set.graph, &choices, &none, DeriveOptions { fresh_seed: 0 });
    let t2 = derive_transition(&set.graph, &choices, &none, DeriveOptions { fresh_seed: 1000 });
    match (t1, t2) {
        (Err(_), Err(_)) => Ok(false),
        (Ok(_), Err(e)) | (Err(e), Ok(_)) => Err(format!("only one derivation fails: {e}")),
        (Ok(t1), Ok(t2)) => {
            let pinned: Ren = set.graph.nodes.iter().map(|x| (x.clone(), x.clone())).collect();
            let r =
                transition_renaming(&t2, &t1, &pinned).ok_or_else(|| format!("no renaming between {t1} and {t2}"))?;
            verify_renaming(&t2, &t1, &r).map_err(|e| format!("{e}: {t1} vs {t2}"))?;
            Ok(true)
        }
    }
}

const TARGETS: [&str; 6] = ["u", "v", "w", "r", "s", "t"];

/// Renaming the graph injectively renames what can be derived from it: the
/// same choice map succeeds on both or on neither, and the results agree
/// along the renaming up to fresh names and to the choice of representative
/// in each fused class.
pub fn check_injren(seed: u64) -> Result<bool, String> {
    let set = gen_production_set(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1A7);
    let mut targets: Vec<Name> = TARGETS.iter().map(|s| Name::user(s)).collect();
    targets.shuffle(&mut rng);
    let sigma: Ren = set.graph.nodes.iter().cloned().zip(targets).collect();
    let renamed = set.graph.rename_map(&sigma);
    let choices = random_choices(&mut rng, &set);
    let none = BTreeMap::new();
    let t = derive_transition(&set.graph, &choices, &none, DeriveOptions::default());
    let u = derive_transition(&renamed, &choices, &none, DeriveOptions::default());
    match (t, u) {
        (Err(_), Err(_)) => Ok(false),
        (Ok(_), Err(e)) | (Err(e), Ok(_)) => Err(format!("only one side derives: {e}")),
        (Ok(t), Ok(u)) => {
            let moved = rename_transition(&t, &sigma).map_err(|e| e.to_string())?;
            let expected =
                adopt_representatives(&moved, &u).ok_or_else(|| format!("{u} fuses differently from {moved}"))?;
            let pinned: Ren = renamed.nodes.iter().map(|x| (x.clone(), x.clone())).collect();
            let r =
                transition_renaming(&expected, &u, &pinned).ok_or_else(|| format!("{u} is not a renaming of {t}"))?;
            verify_renaming(&expected, &u, &r).map_err(|e| format!("{e}: {t} vs {u}"))?;
            Ok(true)
        }
    }
}
