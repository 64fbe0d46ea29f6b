use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use thiserror::Error;

use super::translate::{
    amoeboids, connector, connector_rank, in_action, is_process_label, out_action, translate_prefix, CLOSE,
};
use crate::fusion::{linearize, normalize, parse_agent_raw, Agent, FusionParseError, Prefix};
use crate::hshr::{Act, Edge, Judgement, Production, ProductionSource, TransitionLabel};
use crate::name::{FreshGen, Name};
use crate::term::Symbol;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProductionBuildError {
    #[error("`{0}` is not a process label")]
    NotProcessLabel(String),
    #[error("cannot read process label: {0}")]
    Parse(#[from] FusionParseError),
    #[error("positions {i} and {j} are not distinct positions of a connector with {k} tentacles")]
    Positions { k: usize, i: usize, j: usize },
}

#[derive(Clone, Copy, Debug)]
pub struct ProductionOptions {
    /// Merge even chains of binary connectors introduced by the renaming of
    /// the continuation, as in the hand-written examples.
    pub collapse_chains: bool,
}

impl Default for ProductionOptions {
    fn default() -> ProductionOptions {
        ProductionOptions { collapse_chains: true }
    }
}

/// Recovers the standard sequential agent from a process label.
pub fn label_agent(label: &str) -> Result<Agent, ProductionBuildError> {
    let inner = label
        .strip_prefix("L{")
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| ProductionBuildError::NotProcessLabel(label.to_string()))?;
    Ok(parse_agent_raw(inner)?)
}

/// One production per summand of the agent named by `label`.
pub fn process_productions(label: &str, opts: ProductionOptions) -> Result<Vec<Production>, ProductionBuildError> {
    let agent = label_agent(label)?;
    let lhs_nodes = agent.free_occurrences();
    let Agent::Sum(branches) = &agent else {
        return Ok(Vec::new());
    };
    let lhs = Edge::new(label, lhs_nodes.clone());
    let mut out = Vec::new();
    for (j, (alpha, cont)) in branches.iter().enumerate() {
        let mut p = branch_production(&agent, &lhs, alpha, cont, opts);
        p.name = Some(format!("{}{}", branch_kind(alpha), j + 1));
        out.push(p);
    }
    Ok(out)
}

fn branch_kind(alpha: &Prefix) -> &'static str {
    match alpha {
        Prefix::Input { .. } => "in",
        Prefix::Output { .. } => "out",
        Prefix::Fusion(_) => "fuse",
    }
}

fn branch_production(agent: &Agent, lhs: &Edge, alpha: &Prefix, cont: &Agent, opts: ProductionOptions) -> Production {
    let gamma: Vec<Name> = lhs.att.clone();
    let mut gen = FreshGen::avoiding(agent.all_names().iter());
    let prefix_label = translate_prefix(alpha);
    // The effect of a fusion is rendered by connectors in the target.
    let label = TransitionLabel { lambda: prefix_label.lambda.clone(), pi: BTreeMap::new() };
    let pi = prefix_label.pi;

    let mut fn_cont: Vec<Name> = Vec::new();
    for n in cont.free_occurrences() {
        if !fn_cont.contains(&n) {
            fn_cont.push(n);
        }
    }
    let xi: BTreeMap<Name, Name> = fn_cont.iter().map(|x| (x.clone(), gen.fresh_like(x))).collect();
    let renamed = cont.subst(&xi, &mut gen);
    let nf = normalize(&renamed).expect("continuations are closed for agent variables");
    let lin = linearize(&nf);
    let mut edges: Vec<Edge> = lin.linear.iter().map(super::translate::sequential_edge).collect();
    edges.extend(amoeboids(&lin.sigma));
    edges.extend(nf.restricted.iter().map(|x| Edge::new(CLOSE, vec![x.clone()])));
    let mut nodes: BTreeSet<Name> = nf.free_names();
    nodes.extend(nf.restricted.iter().cloned());
    nodes.extend(lin.fn_order.iter().cloned());

    edges.extend(amoeboids(&xi));
    edges.extend(amoeboids(&pi));

    let mut busy: BTreeSet<Name> = label.exposed();
    for (k, v) in &pi {
        busy.insert(k.clone());
        busy.insert(v.clone());
    }
    busy.extend(fn_cont.iter().cloned());
    for x in &gamma {
        if !busy.contains(x) {
            edges.push(Edge::new(CLOSE, vec![x.clone()]));
        }
    }
    nodes.extend(gamma.iter().cloned());
    let mut target = Judgement::with_attached(nodes, edges);
    if opts.collapse_chains {
        let images: BTreeSet<Name> = xi.values().cloned().collect();
        target = collapse_chains(&target, &gamma.iter().cloned().collect(), &images);
    }
    Production { name: None, lhs: lhs.clone(), label, target }
}

/// Replaces `a -m2- b -m2- c`, with `b` a renaming image of degree two and
/// `c` a fresh node, by the single node `a`.
fn collapse_chains(g: &Judgement, gamma: &BTreeSet<Name>, images: &BTreeSet<Name>) -> Judgement {
    let m2 = connector(2);
    let mut g = g.clone();
    for b in images {
        let at_b: Vec<usize> = (0..g.edges.len()).filter(|&i| g.edges[i].att.contains(b)).collect();
        if at_b.len() != 2 || at_b.iter().any(|&i| *g.edges[i].label != *m2) {
            continue;
        }
        let other = |i: usize| g.edges[i].att.iter().find(|n| *n != b).cloned();
        let (Some(p), Some(q)) = (other(at_b[0]), other(at_b[1])) else { continue };
        let (a, c) = match (gamma.contains(&p), gamma.contains(&q)) {
            (true, false) => (p, q),
            (false, true) => (q, p),
            _ => continue,
        };
        if images.contains(&c) {
            continue;
        }
        let mut edges: Vec<Edge> = Vec::new();
        for (i, e) in g.edges.iter().enumerate() {
            if !at_b.contains(&i) {
                edges.push(e.rename(&|n: &Name| if *n == c { a.clone() } else { n.clone() }));
            }
        }
        let nodes = g.nodes.iter().filter(|n| **n != *b && **n != c).cloned();
        g = Judgement::with_attached(nodes, edges);
    }
    g
}

/// `m_k` keeps itself, exposes `in_n` at position `i` and `out_n` at
/// position `j` (both 1-based), and bridges the exposed vectors pairwise.
pub fn auxiliary_production(k: usize, n: usize, i: usize, j: usize) -> Result<Production, ProductionBuildError> {
    if i == j || i == 0 || j == 0 || i > k || j > k {
        return Err(ProductionBuildError::Positions { k, i, j });
    }
    let gamma: Vec<Name> = (1..=k).map(|t| Name::user(&format!("t{t}"))).collect();
    let ys1: Vec<Name> = (1..=n).map(|t| Name::user(&format!("p{t}"))).collect();
    let ys2: Vec<Name> = (1..=n).map(|t| Name::user(&format!("q{t}"))).collect();
    let lhs = Edge::new(&connector(k), gamma.clone());
    let mut label = TransitionLabel::default();
    label.lambda.insert(gamma[i - 1].clone(), Act::new(&in_action(n), ys1.clone()));
    label.lambda.insert(gamma[j - 1].clone(), Act::new(&out_action(n), ys2.clone()));
    let mut edges = vec![lhs.clone()];
    for (a, b) in ys1.iter().zip(&ys2) {
        edges.push(Edge::new(&connector(2), vec![a.clone(), b.clone()]));
    }
    let nodes = gamma.iter().chain(&ys1).chain(&ys2).cloned();
    Ok(Production {
        name: Some(format!("aux{k}_{n}_{i}_{j}")),
        lhs,
        label,
        target: Judgement::with_attached(nodes, edges),
    })
}

type ProductionList = Vec<Arc<Production>>;

/// Productions for translated processes: process productions built from
/// labels on demand, auxiliary productions for the given arities, and none
/// for closing edges.
pub struct FusionProductions {
    pub arities: BTreeSet<usize>,
    pub opts: ProductionOptions,
    cache: Mutex<HashMap<(String, usize), ProductionList>>,
}

impl FusionProductions {
    pub fn new(arities: BTreeSet<usize>, opts: ProductionOptions) -> FusionProductions {
        FusionProductions { arities, opts, cache: Mutex::new(HashMap::new()) }
    }

    /// Arities of all prefixes in `a`.
    pub fn for_agent(a: &Agent, opts: ProductionOptions) -> FusionProductions {
        let mut arities = BTreeSet::new();
        crate::fusion::prefix_arities(a, &mut arities);
        FusionProductions::new(arities, opts)
    }

    fn build(&self, label: &str, rank: usize) -> Vec<Arc<Production>> {
        if is_process_label(label) {
            return process_productions(label, self.opts)
                .map(|ps| ps.into_iter().filter(|p| p.lhs.att.len() == rank).map(Arc::new).collect())
                .unwrap_or_default();
        }
        match connector_rank(label) {
            Some(k) if k == rank && k >= 2 => {
                let mut out = Vec::new();
                for &n in &self.arities {
                    for i in 1..=k {
                        for j in 1..=k {
                            if i != j {
                                out.push(Arc::new(auxiliary_production(k, n, i, j).expect("valid positions")));
                            }
                        }
                    }
                }
                out
            }
            _ => Vec::new(),
        }
    }
}

impl ProductionSource for FusionProductions {
    fn productions_for(&self, label: &Symbol, rank: usize) -> Vec<Arc<Production>> {
        let key = (label.to_string(), rank);
        if let Some(ps) = self.cache.lock().expect("cache lock").get(&key) {
            return ps.clone();
        }
        let ps = self.build(label, rank);
        self.cache.lock().expect("cache lock").insert(key, ps.clone());
        ps
    }
}
