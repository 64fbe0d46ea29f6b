use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::ast::Agent;
use crate::name::{FreshGen, Name};
use crate::term::{mgu, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FusionError {
    #[error("agent variable {0} is not bound")]
    FreeAgentVar(String),
    #[error("no substitutive effect: {0}")]
    NoEffect(String),
}

/// `(restricted)(S1 | ... | Sn)` with sequential `Si`, every restricted name
/// free in some `Si`, and restricted names ordered by first free occurrence.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct NormalForm {
    pub restricted: Vec<Name>,
    pub sequentials: Vec<Agent>,
}

impl NormalForm {
    pub fn to_agent(&self) -> Agent {
        Agent::scope_all(&self.restricted, Agent::par_all(self.sequentials.iter().cloned()))
    }

    pub fn free_names(&self) -> BTreeSet<Name> {
        let mut out: BTreeSet<Name> = self.sequentials.iter().flat_map(|s| s.free_names()).collect();
        for r in &self.restricted {
            out.remove(r);
        }
        out
    }

    pub fn all_names(&self) -> BTreeSet<Name> {
        let mut out: BTreeSet<Name> = self.restricted.iter().cloned().collect();
        for s in &self.sequentials {
            out.extend(s.all_names());
        }
        out
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_agent())
    }
}

/// Extrudes scopes and unfolds top-level recursion once.
pub fn normalize(a: &Agent) -> Result<NormalForm, FusionError> {
    if let Some(v) = a.free_agent_vars().into_iter().next() {
        return Err(FusionError::FreeAgentVar(v.to_string()));
    }
    Ok(normalize_open(a))
}

/// Like [`normalize`] but free agent variables are kept as components.
pub(crate) fn normalize_open(a: &Agent) -> NormalForm {
    normalize_items(a, true)
}

/// Flattens a level. Without `unfold`, top-level `rec` agents are kept as
/// components.
pub(crate) fn normalize_items(a: &Agent, unfold: bool) -> NormalForm {
    let mut gen = FreshGen::avoiding(a.all_names().iter());
    let mut used = a.free_names();
    let mut restricted = Vec::new();
    let mut seqs = Vec::new();
    flatten(a, unfold, &mut used, &mut gen, &mut restricted, &mut seqs);
    let mut order: Vec<Name> = Vec::new();
    let rs: BTreeSet<Name> = restricted.iter().cloned().collect();
    for s in &seqs {
        for n in s.free_occurrences() {
            if rs.contains(&n) && !order.contains(&n) {
                order.push(n);
            }
        }
    }
    NormalForm { restricted: order, sequentials: seqs }
}

fn flatten(
    a: &Agent,
    unfold: bool,
    used: &mut BTreeSet<Name>,
    gen: &mut FreshGen,
    restricted: &mut Vec<Name>,
    seqs: &mut Vec<Agent>,
) {
    match a {
        Agent::Nil => {}
        Agent::Sum(_) | Agent::Const(..) | Agent::Var(_) => seqs.push(a.clone()),
        Agent::Par(x, y) => {
            flatten(x, unfold, used, gen, restricted, seqs);
            flatten(y, unfold, used, gen, restricted, seqs);
        }
        Agent::Scope(x, body) => {
            if used.contains(x) {
                let y = gen.fresh_like(x);
                let renamed = body.subst(&[(x.clone(), y.clone())].into(), gen);
                used.insert(y.clone());
                restricted.push(y);
                flatten(&renamed, unfold, used, gen, restricted, seqs);
            } else {
                used.insert(x.clone());
                restricted.push(x.clone());
                flatten(body, unfold, used, gen, restricted, seqs);
            }
        }
        Agent::Rec(..) if !unfold => seqs.push(a.clone()),
        Agent::Rec(..) => {
            let unfolded = a.unfold(gen).expect("rec");
            flatten(&unfolded, unfold, used, gen, restricted, seqs);
        }
    }
}

/// A normal form whose sequentials have one fresh name per free occurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearDecomposition {
    pub restricted: Vec<Name>,
    /// Linear sequentials, one per sequential of the normal form.
    pub linear: Vec<Agent>,
    /// Maps each fresh occurrence name back to the name it replaced.
    pub sigma: BTreeMap<Name, Name>,
    /// Fresh names in occurrence order.
    pub fn_order: Vec<Name>,
    /// Fresh names of each linear sequential, in occurrence order.
    pub per_sequential: Vec<Vec<Name>>,
}

pub fn linearize(nf: &NormalForm) -> LinearDecomposition {
    let mut gen = FreshGen::avoiding(nf.all_names().iter());
    let mut sigma = BTreeMap::new();
    let mut fn_order = Vec::new();
    let mut linear = Vec::new();
    let mut per_sequential = Vec::new();
    for s in &nf.sequentials {
        let mut mine = Vec::new();
        let l = s.map_free_occurrences(&mut |n| {
            let f = gen.fresh_like(n);
            sigma.insert(f.clone(), n.clone());
            fn_order.push(f.clone());
            mine.push(f.clone());
            f
        });
        linear.push(l);
        per_sequential.push(mine);
    }
    LinearDecomposition { restricted: nf.restricted.clone(), linear, sigma, fn_order, per_sequential }
}

/// Canonical name of the `i`-th free occurrence in a standard form.
pub fn std_name(i: usize) -> Name {
    Name::user(&format!("x{i}"))
}

/// Rewrites a sequential agent so that its free occurrences are `x1..xn`,
/// bound names are `b1, b2, ...` and recursion variables `X1, X2, ...`, all
/// numbered in pre-order. Returns the standard form and the names it
/// abstracted, in occurrence order.
pub fn standard_form(s: &Agent) -> (Agent, Vec<Name>) {
    let occ = s.free_occurrences();
    let mut k = 0;
    let linear = s.map_free_occurrences(&mut |_| {
        k += 1;
        std_name(k)
    });
    let mut counters = (0usize, 0usize);
    let canon = canon_binders(&linear, &mut counters, &BTreeMap::new(), &BTreeMap::new());
    (canon, occ)
}

fn canon_binders(
    a: &Agent,
    c: &mut (usize, usize),
    names: &BTreeMap<Name, Name>,
    vars: &BTreeMap<Arc<str>, Arc<str>>,
) -> Agent {
    let rn = |n: &Name| names.get(n).cloned().unwrap_or_else(|| n.clone());
    match a {
        Agent::Nil => Agent::Nil,
        Agent::Var(v) => Agent::Var(vars.get(v).cloned().unwrap_or_else(|| v.clone())),
        Agent::Const(k, args) => Agent::Const(k.clone(), args.iter().map(rn).collect()),
        Agent::Sum(bs) => Agent::Sum(
            bs.iter().map(|(p, cont)| (p.map_names(&mut |n| rn(n)), canon_binders(cont, c, names, vars))).collect(),
        ),
        Agent::Par(x, y) => {
            let x2 = canon_binders(x, c, names, vars);
            let y2 = canon_binders(y, c, names, vars);
            Agent::par(x2, y2)
        }
        Agent::Scope(x, body) => {
            c.0 += 1;
            let b = Name::user(&format!("b{}", c.0));
            let mut inner = names.clone();
            inner.insert(x.clone(), b.clone());
            Agent::scope(b, canon_binders(body, c, &inner, vars))
        }
        Agent::Rec(v, body) => {
            c.1 += 1;
            let w: Arc<str> = Arc::from(format!("X{}", c.1).as_str());
            let mut inner = vars.clone();
            inner.insert(v.clone(), w.clone());
            Agent::Rec(w, Box::new(canon_binders(body, c, names, &inner)))
        }
    }
}

/// Edge label text for a sequential agent in standard form.
pub fn process_label(std: &Agent) -> String {
    format!("L{{{std}}}")
}

/// An idempotent renaming whose kernel is the equivalence generated by
/// `pairs`.
///
/// With `dom_limit`, only names in it may be moved, so each class may hold at
/// most one name outside it, which then becomes the representative. Other
/// classes use the least `preferred` member, or the least member.
pub fn substitutive_effect(
    pairs: &[(Name, Name)],
    dom_limit: Option<&BTreeSet<Name>>,
    preferred: &BTreeSet<Name>,
) -> Result<BTreeMap<Name, Name>, FusionError> {
    let eqs: Vec<(Term, Term)> = pairs.iter().map(|(a, b)| (Term::Var(a.clone()), Term::Var(b.clone()))).collect();
    let kernel = mgu(&eqs, &BTreeSet::new()).expect("name equations always unify");
    let mut classes: BTreeMap<Name, BTreeSet<Name>> = BTreeMap::new();
    for (a, b) in pairs {
        for n in [a, b] {
            let r = kernel.rename(n);
            classes.entry(r).or_default().insert(n.clone());
        }
    }
    let mut out = BTreeMap::new();
    for members in classes.values() {
        let rep = match dom_limit {
            Some(dom) => {
                let outside: Vec<&Name> = members.iter().filter(|m| !dom.contains(*m)).collect();
                match outside.len() {
                    0 => pick(members, preferred),
                    1 => outside[0].clone(),
                    _ => {
                        let shown: Vec<String> = outside.iter().map(|n| n.to_string()).collect();
                        return Err(FusionError::NoEffect(format!("would identify {}", shown.join(", "))));
                    }
                }
            }
            None => pick(members, preferred),
        };
        for m in members {
            if *m != rep {
                out.insert(m.clone(), rep.clone());
            }
        }
    }
    Ok(out)
}

fn pick(members: &BTreeSet<Name>, preferred: &BTreeSet<Name>) -> Name {
    members.iter().find(|m| preferred.contains(*m)).unwrap_or_else(|| members.iter().next().expect("class")).clone()
}

/// Arities of every input and output prefix in an agent.
pub fn prefix_arities(a: &Agent, out: &mut BTreeSet<usize>) {
    match a {
        Agent::Nil | Agent::Var(_) | Agent::Const(..) => {}
        Agent::Sum(bs) => {
            for (p, c) in bs {
                if let Some(n) = p.arity() {
                    out.insert(n);
                }
                prefix_arities(c, out);
            }
        }
        Agent::Par(x, y) => {
            prefix_arities(x, out);
            prefix_arities(y, out);
        }
        Agent::Scope(_, b) | Agent::Rec(_, b) => prefix_arities(b, out),
    }
}

/// Serializable summary of a normal form.
#[derive(Serialize)]
pub struct NormalFormView {
    pub restricted: Vec<String>,
    pub sequentials: Vec<String>,
}

impl From<&NormalForm> for NormalFormView {
    fn from(nf: &NormalForm) -> Self {
        NormalFormView {
            restricted: nf.restricted.iter().map(|n| n.to_string()).collect(),
            sequentials: nf.sequentials.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::parse::parse_agent;

    fn n(s: &str) -> Name {
        Name::from(s)
    }

    #[test]
    fn extrudes_and_unfolds() {
        let a = parse_agent("(u z)('u<z>.0 | rec X.(x)u<x>.('u<x>.0 | X))").unwrap();
        let nf = normalize(&a).unwrap();
        assert_eq!(nf.restricted, vec![n("u"), n("z"), n("x")]);
        assert_eq!(nf.sequentials.len(), 2);
        assert_eq!(nf.sequentials[1].to_string(), "u<x>.('u<x>.0 | rec X.(x)u<x>.('u<x>.0 | X))");
    }

    #[test]
    fn drops_unused_restrictions_and_nil() {
        let nf = normalize(&parse_agent("(x)0 | (y)a<y>.0 | 0").unwrap()).unwrap();
        assert_eq!(nf.restricted, vec![n("y")]);
        assert_eq!(nf.sequentials.len(), 1);
    }

    #[test]
    fn restricted_names_follow_first_occurrence() {
        let nf =
            normalize(&parse_agent("(u x y z w)(Q(x, y, z) | 'u<x y>.R(u, x) | u<z w>.S(z, w))").unwrap()).unwrap();
        assert_eq!(nf.restricted, vec![n("x"), n("y"), n("z"), n("u"), n("w")]);
    }

    #[test]
    fn linearization_maps_back() {
        let nf = normalize(&parse_agent("(u z)('u<z>.0 | rec X.(x)u<x>.('u<x>.0 | X))").unwrap()).unwrap();
        let lin = linearize(&nf);
        assert_eq!(lin.fn_order.len(), 8);
        for (s, l) in nf.sequentials.iter().zip(&lin.linear) {
            let back = l.map_free_occurrences(&mut |x| lin.sigma[x].clone());
            assert_eq!(&back, s);
            let occ = l.free_occurrences();
            let set: BTreeSet<_> = occ.iter().collect();
            assert_eq!(set.len(), occ.len());
        }
    }

    #[test]
    fn standard_form_is_alpha_invariant() {
        let a = parse_agent("u<y>.(v)'y<v>.0").unwrap();
        let b = parse_agent("p<q>.(w)'q<w>.0").unwrap();
        let (sa, oa) = standard_form(&a);
        let (sb, _) = standard_form(&b);
        assert_eq!(sa, sb);
        assert_eq!(process_label(&sa), "L{x1<x2>.(b1)'x3<b1>.0}");
        assert_eq!(oa, vec![n("u"), n("y"), n("y")]);
    }

    #[test]
    fn effect_respects_domain_limit() {
        let dom: BTreeSet<Name> = [n("x"), n("y")].into();
        let e = substitutive_effect(&[(n("x"), n("a")), (n("y"), n("x"))], Some(&dom), &BTreeSet::new()).unwrap();
        assert_eq!(e, [(n("x"), n("a")), (n("y"), n("a"))].into());
        let bad = substitutive_effect(&[(n("a"), n("b"))], Some(&dom), &BTreeSet::new());
        assert!(matches!(bad, Err(FusionError::NoEffect(_))));
    }
}
