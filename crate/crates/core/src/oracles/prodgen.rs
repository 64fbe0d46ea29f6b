use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::hshr::{admit_all, enumerate_transitions, Act, Edge, EnumOptions, Judgement, Production, TransitionLabel};
use crate::hshr2slp::{check_correspondence, translate_production, ClauseOptions};
use crate::name::Name;

/// A start graph together with the productions that may rewrite it.
#[derive(Clone, Debug)]
pub struct ProductionSet {
    pub graph: Judgement,
    pub productions: Vec<Arc<Production>>,
}

const LABELS: [&str; 2] = ["A", "B"];
const ACTIONS: [&str; 2] = ["a", "b"];
const NODES: [&str; 3] = ["u", "v", "w"];
const ATTEMPTS: usize = 64;

fn n(s: &str) -> Name {
    Name::user(s)
}

struct Shape {
    ranks: BTreeMap<&'static str, usize>,
    actions: Vec<(&'static str, usize)>,
}

fn random_production(rng: &mut ChaCha8Rng, shape: &Shape, label: &str, k: usize) -> Option<Production> {
    let gamma: Vec<Name> = (1..=k).map(|i| n(&format!("x{i}"))).collect();
    let mut pi = BTreeMap::new();
    if k == 2 && rng.gen_bool(0.2) {
        pi.insert(gamma[1].clone(), gamma[0].clone());
    }
    let rep = |x: &Name| pi.get(x).cloned().unwrap_or_else(|| x.clone());
    let reps: Vec<Name> = gamma.iter().map(rep).collect::<BTreeSet<_>>().into_iter().collect();
    let news = [n("y1"), n("y2")];
    let mut lambda = BTreeMap::new();
    for x in &gamma {
        if rng.gen_bool(0.35) {
            continue;
        }
        let (sym, arity) = *shape.actions.choose(rng)?;
        let args: Vec<Name> = (0..arity)
            .map(|_| if rng.gen_bool(0.6) { news.choose(rng).cloned() } else { reps.choose(rng).cloned() })
            .collect::<Option<_>>()?;
        lambda.insert(x.clone(), Act::new(sym, args));
    }
    let label_ = TransitionLabel { lambda, pi };
    let mut pool: Vec<Name> = reps.clone();
    pool.extend(label_.exposed().into_iter().filter(|y| !reps.contains(y)));
    if rng.gen_bool(0.25) {
        pool.push(n("i1"));
    }
    let mut edges = Vec::new();
    for _ in 0..rng.gen_range(0..=2) {
        let (l, r) = shape.ranks.iter().collect::<Vec<_>>().choose(rng).map(|(l, r)| (**l, **r))?;
        let att: Vec<Name> = (0..r).map(|_| pool.choose(rng).cloned()).collect::<Option<_>>()?;
        edges.push(Edge::new(l, att));
    }
    let mut nodes: BTreeSet<Name> = reps.iter().cloned().collect();
    nodes.extend(label_.exposed());
    let p = Production {
        name: None,
        lhs: Edge::new(label, gamma),
        label: label_,
        target: Judgement::with_attached(nodes, edges),
    };
    p.validate().ok()?;
    translate_production(&p, ClauseOptions::default()).ok()?;
    Some(p)
}

/// A start graph of at most three edges over at most three nodes, with one
/// or two productions per edge label. Labels have rank one or two, there
/// are one or two action symbols, and each action symbol has a fixed arity
/// of at most two. Productions whose clause is not synchronized are
/// redrawn.
pub fn gen_production_set(seed: u64) -> ProductionSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ranks: BTreeMap<&str, usize> = LABELS.iter().map(|l| (*l, rng.gen_range(1..=2))).collect();
    let n_actions = rng.gen_range(1..=ACTIONS.len());
    let actions: Vec<(&str, usize)> = ACTIONS[..n_actions].iter().map(|a| (*a, rng.gen_range(0..=2))).collect();
    let shape = Shape { ranks, actions };

    let n_nodes = rng.gen_range(1..=NODES.len());
    let nodes: Vec<Name> = NODES[..n_nodes].iter().map(|s| n(s)).collect();
    let mut edges = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let l = *LABELS.choose(&mut rng).expect("labels");
        let att: Vec<Name> = (0..shape.ranks[l]).map(|_| nodes.choose(&mut rng).expect("nodes").clone()).collect();
        edges.push(Edge::new(l, att));
    }
    let graph = Judgement::with_attached(nodes, edges);

    let used: BTreeSet<&str> =
        graph.edges.iter().map(|e| LABELS.iter().find(|l| **l == &*e.label).copied().expect("label")).collect();
    let mut productions = Vec::new();
    for l in used {
        let wanted = rng.gen_range(1..=2);
        let mut made = 0;
        for _ in 0..ATTEMPTS {
            if made == wanted {
                break;
            }
            if let Some(mut p) = random_production(&mut rng, &shape, l, shape.ranks[l]) {
                made += 1;
                p.name = Some(format!("{}{}", l.to_lowercase(), made));
                productions.push(Arc::new(p));
            }
        }
    }
    ProductionSet { graph, productions }
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrespondenceVerdict {
    pub seed: u64,
    pub graph: String,
    pub productions: Vec<String>,
    pub transitions: usize,
    pub big_steps: usize,
    pub ok: bool,
    pub failure: Option<String>,
}

/// Runs `check_correspondence` on every transition of the generated set.
pub fn check_production_set(seed: u64) -> CorrespondenceVerdict {
    let set = gen_production_set(seed);
    let en = enumerate_transitions(&set.graph, &set.productions, &admit_all, EnumOptions::default());
    let mut v = CorrespondenceVerdict {
        seed,
        graph: set.graph.to_string(),
        productions: set.productions.iter().map(|p| p.to_string()).collect(),
        transitions: en.transitions.len(),
        big_steps: 0,
        ok: !en.incomplete,
        failure: en.incomplete.then(|| "transition enumeration hit its bound".to_string()),
    };
    for t in &en.transitions {
        let r = check_correspondence(t, &set.productions);
        v.big_steps = v.big_steps.max(r.big_steps);
        if !r.passed() {
            v.ok = false;
            v.failure = Some(format!("{t}: {}", r.counterexample.unwrap_or_default()));
            break;
        }
    }
    v
}
