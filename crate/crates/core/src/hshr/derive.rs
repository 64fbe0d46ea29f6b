use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use super::graph::{Act, Choice, Edge, Judgement, Production, Transition, TransitionLabel};
use crate::name::{FreshGen, Name};
use crate::term::{mgu, Symbol, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeriveError {
    #[error("node {x} must expose both {a} and {b}")]
    HoareViolation { x: Name, a: String, b: String },
    #[error("action {action} is used with arities {left} and {right} at node {x}")]
    ArityMismatch { x: Name, action: String, left: usize, right: usize },
    #[error("production for {expected} cannot rewrite edge {edge}")]
    LabelMismatch { edge: String, expected: String },
    #[error("{given} choices given for {edges} edges")]
    ChoiceCount { given: usize, edges: usize },
    #[error("node {0} is not isolated")]
    NotIsolated(Name),
    #[error("name {0} exposed by a new node is not fresh")]
    NotFresh(Name),
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DeriveOptions {
    /// Shifts every generated index, so two runs with different seeds pick
    /// different fresh names.
    pub fresh_seed: u32,
}

/// Fresh copy of a production rewriting `edge`, or the idle rule.
struct Instance {
    lhs: Vec<Name>,
    label: TransitionLabel,
    target: Judgement,
}

fn instantiate(choice: &Choice, edge: &Edge, gen: &mut FreshGen) -> Result<Instance, DeriveError> {
    match choice {
        Choice::Idle => {
            let lhs: Vec<Name> = edge.att.iter().map(|x| gen.fresh_like(x)).collect();
            let target = Judgement::with_attached([], vec![Edge { label: edge.label.clone(), att: lhs.clone() }]);
            Ok(Instance { lhs, label: TransitionLabel::default(), target })
        }
        Choice::Use(p) => {
            if p.lhs.label != edge.label || p.lhs.att.len() != edge.att.len() {
                return Err(DeriveError::LabelMismatch { edge: edge.to_string(), expected: p.lhs.to_string() });
            }
            let copy = fresh_copy(p, gen);
            Ok(Instance { lhs: copy.lhs.att.clone(), label: copy.label, target: copy.target })
        }
    }
}

/// An α-variant of `p` whose names all come from `gen`.
pub fn fresh_copy(p: &Production, gen: &mut FreshGen) -> Production {
    let ren: BTreeMap<Name, Name> = p.all_names().into_iter().map(|n| (n.clone(), gen.fresh_like(&n))).collect();
    p.rename(&|n| ren[n].clone())
}

fn describe(a: &Option<(Symbol, usize)>) -> String {
    match a {
        None => "eps".into(),
        Some((s, n)) => format!("{s}/{n}"),
    }
}

/// Checks that two action signatures may meet at node `x`.
pub(crate) fn compatible(
    x: &Name,
    a: &Option<(Symbol, usize)>,
    b: &Option<(Symbol, usize)>,
) -> Result<(), DeriveError> {
    match (a, b) {
        (Some((s, n)), Some((t, m))) if s == t && n != m => {
            Err(DeriveError::ArityMismatch { x: x.clone(), action: s.to_string(), left: *n, right: *m })
        }
        _ if a == b => Ok(()),
        _ => Err(DeriveError::HoareViolation { x: x.clone(), a: describe(a), b: describe(b) }),
    }
}

/// Builds the transition obtained by applying `choice[i]` to the `i`-th edge
/// of `g`: parallel composition of fresh copies, one merge onto the nodes of
/// `g`, then the rule for isolated nodes.
pub fn derive_transition(
    g: &Judgement,
    choice: &[Choice],
    new_nodes: &BTreeMap<Name, (Symbol, Vec<Name>)>,
    opts: DeriveOptions,
) -> Result<Transition, DeriveError> {
    if choice.len() != g.edges.len() {
        return Err(DeriveError::ChoiceCount { given: choice.len(), edges: g.edges.len() });
    }
    let attached = g.attached();
    let mut reserved: Vec<Name> = g.all_names().into_iter().collect();
    for (x, (_, ys)) in new_nodes {
        if attached.contains(x) || !g.nodes.contains(x) {
            return Err(DeriveError::NotIsolated(x.clone()));
        }
        for y in ys {
            if g.nodes.contains(y) {
                return Err(DeriveError::NotFresh(y.clone()));
            }
        }
        reserved.extend(ys.iter().cloned());
    }
    let mut gen = FreshGen::seeded(reserved.iter(), opts.fresh_seed);
    let mut instances = Vec::with_capacity(choice.len());
    for (e, c) in g.edges.iter().zip(choice) {
        instances.push(instantiate(c, e, &mut gen)?);
    }

    // σ sends every copied left-hand node to the node it rewrites.
    let mut sigma: BTreeMap<Name, Name> = BTreeMap::new();
    let mut at_node: BTreeMap<Name, Vec<Act>> = BTreeMap::new();
    for (inst, e) in instances.iter().zip(&g.edges) {
        for (z, x) in inst.lhs.iter().zip(&e.att) {
            sigma.insert(z.clone(), x.clone());
            at_node.entry(x.clone()).or_default().push(inst.label.act(z));
        }
    }
    let sig = |n: &Name| sigma.get(n).cloned().unwrap_or_else(|| n.clone());
    let mut eqs: Vec<(Term, Term)> = Vec::new();
    for (x, acts) in &at_node {
        let first = &acts[0];
        for other in &acts[1..] {
            compatible(x, &first.signature(), &other.signature())?;
            for (y1, y2) in first.names().iter().zip(other.names()) {
                eqs.push((Term::Var(sig(y1)), Term::Var(sig(y2))));
            }
        }
    }
    for inst in &instances {
        for (z, w) in &inst.label.pi {
            eqs.push((Term::Var(sig(z)), Term::Var(sig(w))));
        }
    }
    let preferred: BTreeSet<Name> = attached.clone();
    let rho = mgu(&eqs, &preferred).expect("name equations always unify");
    let sr = |n: &Name| rho.rename(&sig(n));

    let mut lambda: BTreeMap<Name, Act> = BTreeMap::new();
    for (x, acts) in &at_node {
        lambda.insert(x.clone(), acts[0].rename(&sr));
    }
    let mut pi = BTreeMap::new();
    for x in &attached {
        let y = rho.rename(x);
        if y != *x {
            pi.insert(x.clone(), y);
        }
    }
    let mut nodes: BTreeSet<Name> = BTreeSet::new();
    let mut edges: Vec<Edge> = Vec::new();
    for inst in &instances {
        nodes.extend(inst.target.nodes.iter().map(&sr));
        edges.extend(inst.target.edges.iter().map(|e| e.rename(&sr)));
    }
    for x in g.isolated() {
        nodes.insert(x.clone());
        match new_nodes.get(&x) {
            Some((a, ys)) => {
                nodes.extend(ys.iter().cloned());
                lambda.insert(x.clone(), Act::Do(a.clone(), ys.clone()));
            }
            None => {
                lambda.insert(x.clone(), Act::Eps);
            }
        }
    }
    Ok(Transition {
        source: g.clone(),
        label: TransitionLabel { lambda, pi },
        target: Judgement { nodes, edges },
        provenance: Some(choice.to_vec()),
    })
}

/// Convenience wrapper that uses one production per edge, by index, with
/// `None` for the idle rule.
pub fn derive_with(
    g: &Judgement,
    prods: &[Arc<Production>],
    picks: &[Option<usize>],
) -> Result<Transition, DeriveError> {
    let choice: Vec<Choice> = picks.iter().map(|p| p.map_or(Choice::Idle, |i| Choice::Use(prods[i].clone()))).collect();
    derive_transition(g, &choice, &BTreeMap::new(), DeriveOptions::default())
}
