use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::fusion::{linearize, normalize, process_label, standard_form, Agent, FusionError, NormalForm, Prefix};
use crate::hshr::{Act, Edge, Judgement, TransitionLabel};
use crate::name::Name;

/// Label of the closing edge.
pub const CLOSE: &str = "n";

/// Label of the amoeboid connector with `k` tentacles.
pub fn connector(k: usize) -> String {
    format!("m{k}")
}

/// Tentacle count of a connector label.
pub fn connector_rank(label: &str) -> Option<usize> {
    label.strip_prefix('m').and_then(|k| k.parse().ok()).filter(|&k: &usize| k >= 1)
}

pub fn is_process_label(label: &str) -> bool {
    label.starts_with("L{")
}

/// Input and output action symbols for arity `n`.
pub fn in_action(n: usize) -> String {
    format!("in{n}")
}

pub fn out_action(n: usize) -> String {
    format!("out{n}")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("expected {expected} names for {what}, got {got}")]
    Length { what: &'static str, expected: usize, got: usize },
    #[error("node {0} is used twice")]
    Clash(Name),
    #[error(transparent)]
    Fusion(#[from] FusionError),
}

/// `⟦σ⟧`: one connector per name in the image of `sigma`, joining the name
/// with its preimages in name order.
pub fn amoeboids(sigma: &BTreeMap<Name, Name>) -> Vec<Edge> {
    let mut inv: BTreeMap<&Name, Vec<Name>> = BTreeMap::new();
    for (k, v) in sigma {
        if k != v {
            inv.entry(v).or_default().push(k.clone());
        }
    }
    inv.into_iter()
        .map(|(x, pre)| {
            let mut att = vec![x.clone()];
            att.extend(pre);
            Edge::new(&connector(att.len()), att)
        })
        .collect()
}

/// The edge for one linear sequential agent.
pub fn sequential_edge(s: &Agent) -> Edge {
    let (std, occ) = standard_form(s);
    Edge::new(&process_label(&std), occ)
}

/// Translates a normal form. `v` stands for the restricted names and `w` for
/// the fresh occurrence names; by default both are kept as they are.
pub fn translate_process(nf: &NormalForm, v: Option<&[Name]>, w: Option<&[Name]>) -> Result<Judgement, TranslateError> {
    let lin = linearize(nf);
    let v: Vec<Name> = v.map(<[Name]>::to_vec).unwrap_or_else(|| nf.restricted.clone());
    let w: Vec<Name> = w.map(<[Name]>::to_vec).unwrap_or_else(|| lin.fn_order.clone());
    if v.len() != nf.restricted.len() {
        return Err(TranslateError::Length { what: "restricted names", expected: nf.restricted.len(), got: v.len() });
    }
    if w.len() != lin.fn_order.len() {
        return Err(TranslateError::Length { what: "occurrences", expected: lin.fn_order.len(), got: w.len() });
    }
    let free = nf.free_names();
    let mut seen: BTreeSet<Name> = free.clone();
    for n in v.iter().chain(&w) {
        if !seen.insert(n.clone()) {
            return Err(TranslateError::Clash(n.clone()));
        }
    }
    let vmap: BTreeMap<&Name, &Name> = nf.restricted.iter().zip(&v).collect();
    let wmap: BTreeMap<&Name, &Name> = lin.fn_order.iter().zip(&w).collect();
    let rn =
        |n: &Name| -> Name { wmap.get(n).or_else(|| vmap.get(n)).map(|m| (*m).clone()).unwrap_or_else(|| n.clone()) };
    let mut edges: Vec<Edge> = lin.linear.iter().map(|s| sequential_edge(s).rename(&rn)).collect();
    edges.extend(amoeboids(&lin.sigma).into_iter().map(|e| e.rename(&rn)));
    edges.extend(v.iter().map(|x| Edge::new(CLOSE, vec![x.clone()])));
    let nodes = free.into_iter().chain(v).chain(w);
    Ok(Judgement::with_attached(nodes, edges))
}

/// Normalizes and translates with the default parameters.
pub fn translate_agent(a: &Agent) -> Result<Judgement, TranslateError> {
    translate_process(&normalize(a)?, None, None)
}

/// `⟦α⟧`: inputs and outputs expose `in_n` and `out_n` on the channel, a
/// fusion exposes nothing and carries its substitutive effect.
pub fn translate_prefix(p: &Prefix) -> TransitionLabel {
    let mut label = TransitionLabel::default();
    match p {
        Prefix::Input { chan, args } => {
            label.lambda.insert(chan.clone(), Act::new(&in_action(args.len()), args.clone()));
        }
        Prefix::Output { chan, args } => {
            label.lambda.insert(chan.clone(), Act::new(&out_action(args.len()), args.clone()));
        }
        Prefix::Fusion(pairs) => {
            label.pi = crate::fusion::substitutive_effect(pairs, None, &BTreeSet::new()).expect("unrestricted effect");
        }
    }
    label
}
