use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::lex::symbol_text;
use crate::name::Name;
use crate::term::Symbol;

/// A labelled hyperedge.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct Edge {
    #[serde(serialize_with = "ser_sym")]
    pub label: Symbol,
    pub att: Vec<Name>,
}

pub(crate) fn ser_sym<S: serde::Serializer>(s: &Symbol, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(s)
}

impl Edge {
    pub fn new(label: &str, att: Vec<Name>) -> Edge {
        Edge { label: Arc::from(label), att }
    }

    pub fn rename(&self, f: &impl Fn(&Name) -> Name) -> Edge {
        Edge { label: self.label.clone(), att: self.att.iter().map(f).collect() }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", symbol_text(&self.label))?;
        for (i, n) in self.att.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str(")")
    }
}

/// `nodes ⊢ edges`: a finite node set and a multiset of edges over it.
#[derive(Clone, Default, Debug, Serialize)]
pub struct Judgement {
    pub nodes: BTreeSet<Name>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("edge {edge} attaches to {node}, which is not among the nodes")]
pub struct IllFormed {
    pub edge: String,
    pub node: Name,
}

impl Judgement {
    pub fn new(nodes: impl IntoIterator<Item = Name>, edges: Vec<Edge>) -> Result<Judgement, IllFormed> {
        let j = Judgement { nodes: nodes.into_iter().collect(), edges };
        j.check()?;
        Ok(j)
    }

    /// Nodes are the declared ones plus every attached one.
    pub fn with_attached(nodes: impl IntoIterator<Item = Name>, edges: Vec<Edge>) -> Judgement {
        let mut ns: BTreeSet<Name> = nodes.into_iter().collect();
        for e in &edges {
            ns.extend(e.att.iter().cloned());
        }
        Judgement { nodes: ns, edges }
    }

    pub fn check(&self) -> Result<(), IllFormed> {
        for e in &self.edges {
            for n in &e.att {
                if !self.nodes.contains(n) {
                    return Err(IllFormed { edge: e.to_string(), node: n.clone() });
                }
            }
        }
        Ok(())
    }

    /// Nodes with at least one attached edge.
    pub fn attached(&self) -> BTreeSet<Name> {
        self.edges.iter().flat_map(|e| e.att.iter().cloned()).collect()
    }

    pub fn isolated(&self) -> BTreeSet<Name> {
        let att = self.attached();
        self.nodes.iter().filter(|n| !att.contains(*n)).cloned().collect()
    }

    pub fn rename(&self, f: &impl Fn(&Name) -> Name) -> Judgement {
        Judgement { nodes: self.nodes.iter().map(f).collect(), edges: self.edges.iter().map(|e| e.rename(f)).collect() }
    }

    pub fn rename_map(&self, m: &BTreeMap<Name, Name>) -> Judgement {
        self.rename(&|n| m.get(n).cloned().unwrap_or_else(|| n.clone()))
    }

    pub fn sorted_edges(&self) -> Vec<Edge> {
        let mut es = self.edges.clone();
        es.sort();
        es
    }

    /// Equal node sets and equal edge multisets.
    pub fn congruent(&self, other: &Judgement) -> bool {
        self.nodes == other.nodes && self.sorted_edges() == other.sorted_edges()
    }

    /// Multiset of edge labels with ranks.
    pub fn label_profile(&self) -> BTreeMap<(Symbol, usize), usize> {
        let mut m = BTreeMap::new();
        for e in &self.edges {
            *m.entry((e.label.clone(), e.att.len())).or_insert(0) += 1;
        }
        m
    }

    /// Number of edge tentacles on each node.
    pub fn degrees(&self) -> BTreeMap<Name, usize> {
        let mut m: BTreeMap<Name, usize> = self.nodes.iter().map(|n| (n.clone(), 0)).collect();
        for e in &self.edges {
            for n in &e.att {
                *m.entry(n.clone()).or_insert(0) += 1;
            }
        }
        m
    }

    pub fn all_names(&self) -> BTreeSet<Name> {
        let mut s = self.nodes.clone();
        s.extend(self.attached());
        s
    }
}

impl PartialEq for Judgement {
    fn eq(&self, other: &Judgement) -> bool {
        self.congruent(other)
    }
}

impl Eq for Judgement {}

impl fmt::Display for Judgement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("nodes ")?;
        for (i, n) in self.nodes.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str("; ")?;
        if self.edges.is_empty() {
            return f.write_str("nil");
        }
        for (i, e) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// What a node exposes in a transition.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Act {
    Eps,
    Do(Symbol, Vec<Name>),
}

impl Act {
    pub fn new(sym: &str, names: Vec<Name>) -> Act {
        Act::Do(Arc::from(sym), names)
    }

    /// Action symbol and arity, `None` for ε.
    pub fn signature(&self) -> Option<(Symbol, usize)> {
        match self {
            Act::Eps => None,
            Act::Do(a, ys) => Some((a.clone(), ys.len())),
        }
    }

    pub fn names(&self) -> &[Name] {
        match self {
            Act::Eps => &[],
            Act::Do(_, ys) => ys,
        }
    }

    pub fn rename(&self, f: &impl Fn(&Name) -> Name) -> Act {
        match self {
            Act::Eps => Act::Eps,
            Act::Do(a, ys) => Act::Do(a.clone(), ys.iter().map(f).collect()),
        }
    }

    pub fn is_eps(&self) -> bool {
        matches!(self, Act::Eps)
    }
}

impl fmt::Display for Act {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Act::Eps => f.write_str("eps"),
            Act::Do(a, ys) => {
                write!(f, "{}<", symbol_text(a))?;
                for (i, y) in ys.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{y}")?;
                }
                f.write_str(">")
            }
        }
    }
}

impl Serialize for Act {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `(Λ, π)`: per-node actions and an idempotent node fusion.
#[derive(Clone, Default, PartialEq, Eq, Debug, Serialize)]
pub struct TransitionLabel {
    pub lambda: BTreeMap<Name, Act>,
    pub pi: BTreeMap<Name, Name>,
}

impl TransitionLabel {
    pub fn act(&self, x: &Name) -> Act {
        self.lambda.get(x).cloned().unwrap_or(Act::Eps)
    }

    pub fn pi_of(&self, x: &Name) -> Name {
        self.pi.get(x).cloned().unwrap_or_else(|| x.clone())
    }

    /// Names exposed by non-ε actions.
    pub fn exposed(&self) -> BTreeSet<Name> {
        self.lambda.values().flat_map(|a| a.names().iter().cloned()).collect()
    }

    pub fn is_pi_identity(&self) -> bool {
        self.pi.iter().all(|(k, v)| k == v)
    }
}

impl fmt::Display for TransitionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (x, a) in &self.lambda {
            if a.is_eps() {
                continue;
            }
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{x}: {a}")?;
        }
        let moved: Vec<_> = self.pi.iter().filter(|(k, v)| k != v).collect();
        if !moved.is_empty() {
            f.write_str(" ;")?;
            for (i, (k, v)) in moved.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, " {v}/{k}")?;
            }
        }
        Ok(())
    }
}

/// A production `Γ ⊢ L(x1..xn) --(Λ,π)--> Φ ⊢ G`, used as a schema up to
/// renaming.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Production {
    pub name: Option<String>,
    pub lhs: Edge,
    pub label: TransitionLabel,
    pub target: Judgement,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProductionError {
    #[error("left-hand side nodes must be distinct")]
    RepeatedLhsNode,
    #[error("action given for {0}, which is not a left-hand side node")]
    ForeignAction(Name),
    #[error("fusion is not an idempotent map on the left-hand side nodes")]
    BadPi,
    #[error("exposed name {0} is not a representative of the fusion")]
    ExposedNotRepresentative(Name),
    #[error("target is missing node {0}")]
    MissingNode(Name),
    #[error("internal node {0} is isolated in the target")]
    IsolatedInternal(Name),
    #[error(transparent)]
    IllFormed(#[from] IllFormed),
}

impl Production {
    pub fn lhs_nodes(&self) -> &[Name] {
        &self.lhs.att
    }

    pub fn source(&self) -> Judgement {
        Judgement::with_attached([], vec![self.lhs.clone()])
    }

    pub fn validate(&self) -> Result<(), ProductionError> {
        let gamma: BTreeSet<Name> = self.lhs.att.iter().cloned().collect();
        if gamma.len() != self.lhs.att.len() {
            return Err(ProductionError::RepeatedLhsNode);
        }
        for x in self.label.lambda.keys() {
            if !gamma.contains(x) {
                return Err(ProductionError::ForeignAction(x.clone()));
            }
        }
        for (k, v) in &self.label.pi {
            if !gamma.contains(k) || !gamma.contains(v) || self.label.pi_of(v) != *v {
                return Err(ProductionError::BadPi);
            }
        }
        for y in self.label.exposed() {
            if gamma.contains(&y) && self.label.pi_of(&y) != y {
                return Err(ProductionError::ExposedNotRepresentative(y));
            }
        }
        self.target.check()?;
        let mut required: BTreeSet<Name> = gamma.iter().map(|x| self.label.pi_of(x)).collect();
        required.extend(self.label.exposed());
        for n in &required {
            if !self.target.nodes.contains(n) {
                return Err(ProductionError::MissingNode(n.clone()));
            }
        }
        let attached = self.target.attached();
        for n in &self.target.nodes {
            if !required.contains(n) && !attached.contains(n) {
                return Err(ProductionError::IsolatedInternal(n.clone()));
            }
        }
        Ok(())
    }

    /// Every name mentioned by the production.
    pub fn all_names(&self) -> BTreeSet<Name> {
        let mut s: BTreeSet<Name> = self.lhs.att.iter().cloned().collect();
        s.extend(self.label.exposed());
        s.extend(self.target.all_names());
        s
    }

    pub fn rename(&self, f: &impl Fn(&Name) -> Name) -> Production {
        Production {
            name: self.name.clone(),
            lhs: self.lhs.rename(f),
            label: TransitionLabel {
                lambda: self.label.lambda.iter().map(|(k, a)| (f(k), a.rename(f))).collect(),
                pi: self.label.pi.iter().map(|(k, v)| (f(k), f(v))).collect(),
            },
            target: self.target.rename(f),
        }
    }

    pub fn as_transition(&self) -> Transition {
        let lambda = self.lhs.att.iter().map(|x| (x.clone(), self.label.act(x))).collect();
        Transition {
            source: self.source(),
            label: TransitionLabel { lambda, pi: self.label.pi.clone() },
            target: self.target.clone(),
            provenance: None,
        }
    }
}

impl fmt::Display for Production {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} --[{}]--> ", self.lhs, self.label)?;
        let gamma: BTreeSet<Name> = self.lhs.att.iter().cloned().collect();
        let extra: Vec<&Name> = self.target.nodes.iter().filter(|n| !gamma.contains(*n)).collect();
        if !extra.is_empty() {
            f.write_str("nodes")?;
            for (i, n) in extra.iter().enumerate() {
                f.write_str(if i > 0 { ", +" } else { " +" })?;
                write!(f, "{n}")?;
            }
            f.write_str("; ")?;
        }
        if self.target.edges.is_empty() {
            return f.write_str("nil");
        }
        for (i, e) in self.target.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// The rule applied to one edge of a derivation.
#[derive(Clone, Debug)]
pub enum Choice {
    Idle,
    Use(Arc<Production>),
}

impl Choice {
    pub fn production(&self) -> Option<&Arc<Production>> {
        match self {
            Choice::Idle => None,
            Choice::Use(p) => Some(p),
        }
    }
}

/// `Γ ⊢ G --(Λ,π)--> Φ ⊢ G'`.
#[derive(Clone, Debug)]
pub struct Transition {
    pub source: Judgement,
    pub label: TransitionLabel,
    pub target: Judgement,
    /// Rule used for each source edge, when known.
    pub provenance: Option<Vec<Choice>>,
}

impl Transition {
    /// Non-ε actions on non-isolated source nodes.
    pub fn visible_actions(&self) -> BTreeMap<Name, Act> {
        let att = self.source.attached();
        self.label
            .lambda
            .iter()
            .filter(|(k, a)| att.contains(*k) && !a.is_eps())
            .map(|(k, a)| (k.clone(), a.clone()))
            .collect()
    }

    pub fn all_names(&self) -> BTreeSet<Name> {
        let mut s = self.source.all_names();
        s.extend(self.target.all_names());
        s.extend(self.label.exposed());
        s
    }

    /// Checks the well-formedness conditions of a transition.
    pub fn check(&self) -> Result<(), String> {
        let gamma = &self.source.nodes;
        for x in gamma {
            let p = self.label.pi_of(x);
            if !gamma.contains(&p) || self.label.pi_of(&p) != p {
                return Err(format!("fusion is not idempotent on {x}"));
            }
            if !self.target.nodes.contains(&p) {
                return Err(format!("target lacks {p}"));
            }
        }
        for y in self.label.exposed() {
            if gamma.contains(&y) && self.label.pi_of(&y) != y {
                return Err(format!("exposed {y} is not a representative"));
            }
            if !self.target.nodes.contains(&y) {
                return Err(format!("target lacks exposed {y}"));
            }
        }
        self.target.check().map_err(|e| e.to_string())
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} --[{}]--> {}", self.source, self.label, self.target)
    }
}
