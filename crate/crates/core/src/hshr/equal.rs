use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::graph::{Act, Judgement, Transition, TransitionLabel};
use super::iso::{find_renaming, HGraph};
use crate::name::Name;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("renaming sends both {0} and {1} to {2}")]
pub struct NotInjective(pub Name, pub Name, pub Name);

/// Edge multisets and node sets coincide.
pub fn graph_congruent(a: &Judgement, b: &Judgement) -> bool {
    a.congruent(b)
}

fn apply(rho: &BTreeMap<Name, Name>, n: &Name) -> Name {
    rho.get(n).cloned().unwrap_or_else(|| n.clone())
}

/// Transports a transition along an injective renaming, so that
/// `Λ'(xρ) = Λ(x)ρ` and `xρπ' = xπρ`.
pub fn rename_transition(t: &Transition, rho: &BTreeMap<Name, Name>) -> Result<Transition, NotInjective> {
    let mut back: BTreeMap<Name, Name> = BTreeMap::new();
    for n in t.all_names() {
        let m = apply(rho, &n);
        if let Some(prev) = back.insert(m.clone(), n.clone()) {
            if prev != n {
                return Err(NotInjective(prev, n, m));
            }
        }
    }
    let f = |n: &Name| apply(rho, n);
    let label = TransitionLabel {
        lambda: t.label.lambda.iter().map(|(k, a)| (f(k), a.rename(&f))).collect(),
        pi: t.label.pi.iter().map(|(k, v)| (f(k), f(v))).filter(|(k, v)| k != v).collect(),
    };
    Ok(Transition { source: t.source.rename(&f), label, target: t.target.rename(&f), provenance: t.provenance.clone() })
}

fn encode(t: &Transition) -> HGraph {
    let mut g = HGraph::default();
    g.add_nodes(t.all_names().iter());
    for e in &t.source.edges {
        g.add_edge(format!("S:{}", e.label), e.att.clone());
    }
    for e in &t.target.edges {
        g.add_edge(format!("T:{}", e.label), e.att.clone());
    }
    for x in &t.source.nodes {
        g.add_edge("Γ", vec![x.clone()]);
    }
    for x in &t.target.nodes {
        g.add_edge("Φ", vec![x.clone()]);
    }
    let attached = t.source.attached();
    for x in &attached {
        if let Act::Do(a, ys) = t.label.act(x) {
            let mut att = vec![x.clone()];
            att.extend(ys);
            g.add_edge(format!("Λ:{a}/{}", att.len() - 1), att);
        }
    }
    for x in &t.source.nodes {
        let p = t.label.pi_of(x);
        if p != *x {
            g.add_edge("π", vec![x.clone(), p]);
        }
    }
    g
}

/// Searches an injective renaming between two transitions that agrees with
/// `pinned`, ignoring the actions chosen for isolated source nodes.
pub fn transition_renaming(
    a: &Transition,
    b: &Transition,
    pinned: &BTreeMap<Name, Name>,
) -> Option<BTreeMap<Name, Name>> {
    find_renaming(&encode(a), &encode(b), pinned, &|_| false)
}

pub fn transitions_equal_up_to_renaming(a: &Transition, b: &Transition) -> bool {
    transition_renaming(a, b, &BTreeMap::new()).is_some()
}

/// As [`transitions_equal_up_to_renaming`], with every source node fixed.
pub fn transitions_equal_fixing_source(a: &Transition, b: &Transition) -> bool {
    if a.source.nodes != b.source.nodes {
        return false;
    }
    let pinned: BTreeMap<Name, Name> = a.source.nodes.iter().map(|n| (n.clone(), n.clone())).collect();
    transition_renaming(a, b, &pinned).is_some()
}

/// Renames every name outside `keep` to a fresh-looking canonical one, in
/// order of first appearance. Handy for stable printing.
pub fn canonical_fresh(t: &Transition, keep: &BTreeSet<Name>) -> Transition {
    let mut rho = BTreeMap::new();
    let mut gen = crate::name::FreshGen::avoiding(keep.iter());
    let names =
        t.label.lambda.values().flat_map(|a| a.names().iter()).chain(t.target.edges.iter().flat_map(|e| e.att.iter()));
    for n in names.chain(t.target.nodes.iter()) {
        if !keep.contains(n) && !rho.contains_key(n) {
            rho.insert(n.clone(), gen.fresh_like(n));
        }
    }
    rename_transition(t, &rho).expect("canonical renaming is injective")
}
