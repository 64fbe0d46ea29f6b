//! First-order terms, substitutions and most general unifiers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::name::Name;

/// A function symbol.
pub type Symbol = Arc<str>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Name),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(n: impl Into<Name>) -> Term {
        Term::Var(n.into())
    }

    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::App(Arc::from(f), args)
    }

    pub fn as_var(&self) -> Option<&Name> {
        match self {
            Term::Var(n) => Some(n),
            Term::App(..) => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(n) => {
                out.insert(n.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn occurs(&self, x: &Name) -> bool {
        match self {
            Term::Var(n) => n == x,
            Term::App(_, args) => args.iter().any(|a| a.occurs(x)),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn is_function_free(&self) -> bool {
        matches!(self, Term::Var(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(n) => write!(f, "{n}"),
            Term::App(s, args) => {
                write!(f, "{s}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub type Equation = (Term, Term);
pub type EquationSet = Vec<Equation>;

/// A finite map from names to terms, kept free of identity bindings.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution {
    map: BTreeMap<Name, Term>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn identity() -> Substitution {
        Substitution::default()
    }

    /// Adds `x -> t`, dropping it when `t` is `x` itself.
    pub fn insert(&mut self, x: Name, t: Term) {
        if t.as_var() == Some(&x) {
            self.map.remove(&x);
        } else {
            self.map.insert(x, t);
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Name, Term)>) -> Substitution {
        let mut s = Substitution::new();
        for (x, t) in pairs {
            s.insert(x, t);
        }
        s
    }

    /// A renaming from name pairs `(x, y)` meaning `x -> y`.
    pub fn renaming(pairs: impl IntoIterator<Item = (Name, Name)>) -> Substitution {
        Substitution::from_pairs(pairs.into_iter().map(|(x, y)| (x, Term::Var(y))))
    }

    pub fn get(&self, x: &Name) -> Option<&Term> {
        self.map.get(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Term)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn domain(&self) -> BTreeSet<Name> {
        self.map.keys().cloned().collect()
    }

    /// Variables occurring in the images.
    pub fn range_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for t in self.map.values() {
            t.collect_vars(&mut out);
        }
        out
    }

    /// The image of a name, which is the name itself outside the domain.
    pub fn apply_name(&self, x: &Name) -> Term {
        self.map.get(x).cloned().unwrap_or_else(|| Term::Var(x.clone()))
    }

    /// The image of a name under a renaming. Panics on a non-variable image.
    pub fn rename(&self, x: &Name) -> Name {
        match self.map.get(x) {
            None => x.clone(),
            Some(Term::Var(y)) => y.clone(),
            Some(t) => panic!("{x} is bound to the non-variable {t}"),
        }
    }

    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(x) => self.apply_name(x),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.apply(a)).collect()),
        }
    }

    pub fn is_renaming(&self) -> bool {
        self.map.values().all(|t| t.as_var().is_some())
    }

    /// Idempotent when no domain name occurs in an image.
    pub fn is_idempotent(&self) -> bool {
        let dom = &self.map;
        self.map.values().all(|t| t.vars().iter().all(|v| !dom.contains_key(v)))
    }

    pub fn restrict(&self, keep: &BTreeSet<Name>) -> Substitution {
        Substitution {
            map: self.map.iter().filter(|(k, _)| keep.contains(*k)).map(|(k, v)| (k.clone(), v.clone())).collect(),
        }
    }

    /// Equivalence classes of names identified by a renaming, over `universe`.
    pub fn kernel(&self, universe: &BTreeSet<Name>) -> BTreeSet<BTreeSet<Name>> {
        let mut classes: BTreeMap<Term, BTreeSet<Name>> = BTreeMap::new();
        for x in universe {
            classes.entry(self.apply_name(x)).or_default().insert(x.clone());
        }
        classes.into_values().collect()
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, t)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}/{x}")?;
        }
        f.write_str("}")
    }
}

impl serde::Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl serde::Serialize for Substitution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `compose(s1, s2)` applies `s1` first and then `s2`.
///
/// The result is returned as computed. Use [`Substitution::is_idempotent`]
/// to learn whether it is idempotent.
pub fn compose(s1: &Substitution, s2: &Substitution) -> Substitution {
    let mut out = Substitution::new();
    for (x, t) in s1.iter() {
        out.insert(x.clone(), s2.apply(t));
    }
    for (x, t) in s2.iter() {
        if s1.get(x).is_none() {
            out.insert(x.clone(), t.clone());
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("cannot unify {0} with {1}")]
    Clash(Term, Term),
    #[error("{0} occurs in {1}")]
    Occurs(Name, Term),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("substitution is not a renaming: {0}")]
pub struct NotRenaming(pub Substitution);

/// The equations `x = y` for every binding `y/x` of a renaming.
pub fn eqn(s: &Substitution) -> Result<EquationSet, NotRenaming> {
    if !s.is_renaming() {
        return Err(NotRenaming(s.clone()));
    }
    Ok(s.iter().map(|(x, t)| (Term::Var(x.clone()), t.clone())).collect())
}

pub fn apply_eqs(s: &Substitution, eqs: &EquationSet) -> EquationSet {
    eqs.iter().map(|(a, b)| (s.apply(a), s.apply(b))).collect()
}

/// Most general unifier with the occurs check.
///
/// Each class of identified variables that is not bound to a compound term
/// is represented by its least member in `preferred`, or by its least member
/// when none is preferred. The result is idempotent.
pub fn mgu(eqs: &EquationSet, preferred: &BTreeSet<Name>) -> Result<Substitution, UnifyError> {
    let mut uf = UnionFind::default();
    let mut work: Vec<(Term, Term)> = eqs.iter().rev().cloned().collect();
    while let Some((a, b)) = work.pop() {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                let rx = uf.find(&x);
                let ry = uf.find(&y);
                if rx != ry {
                    if let Some((t1, t2)) = uf.union(&rx, &ry) {
                        work.push((t1, t2));
                    }
                    if let Some(t) = uf.term.get(&rx).cloned() {
                        if uf.reaches(&t, &rx) {
                            return Err(UnifyError::Occurs(x, t));
                        }
                    }
                }
            }
            (Term::Var(x), t @ Term::App(..)) | (t @ Term::App(..), Term::Var(x)) => {
                let rx = uf.find(&x);
                match uf.term.get(&rx).cloned() {
                    Some(old) => work.push((old, t)),
                    None => {
                        if uf.reaches(&t, &rx) {
                            return Err(UnifyError::Occurs(x, t));
                        }
                        uf.term.insert(rx, t);
                    }
                }
            }
            (Term::App(f, xs), Term::App(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return Err(UnifyError::Clash(Term::App(f, xs), Term::App(g, ys)));
                }
                for (x, y) in xs.into_iter().zip(ys).rev() {
                    work.push((x, y));
                }
            }
        }
    }
    uf.solve(preferred)
}

#[derive(Default)]
struct UnionFind {
    parent: BTreeMap<Name, Name>,
    term: BTreeMap<Name, Term>,
}

impl UnionFind {
    fn find(&mut self, x: &Name) -> Name {
        let p = match self.parent.get(x) {
            None => {
                self.parent.insert(x.clone(), x.clone());
                return x.clone();
            }
            Some(p) => p.clone(),
        };
        if &p == x {
            return p;
        }
        let r = self.find(&p);
        self.parent.insert(x.clone(), r.clone());
        r
    }

    /// Whether the class `root` occurs in `t` once bound variables are
    /// followed. Checked on every binding, so bindings never form a cycle
    /// and the work list always empties.
    fn reaches(&mut self, t: &Term, root: &Name) -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = vec![t.clone()];
        while let Some(t) = stack.pop() {
            for v in t.vars() {
                let r = self.find(&v);
                if &r == root {
                    return true;
                }
                if seen.insert(r.clone()) {
                    if let Some(u) = self.term.get(&r) {
                        stack.push(u.clone());
                    }
                }
            }
        }
        false
    }

    /// Joins two roots and returns a pending equation when both carry terms.
    fn union(&mut self, a: &Name, b: &Name) -> Option<(Term, Term)> {
        self.parent.insert(b.clone(), a.clone());
        match (self.term.get(a).cloned(), self.term.remove(b)) {
            (Some(ta), Some(tb)) => Some((ta, tb)),
            (None, Some(tb)) => {
                self.term.insert(a.clone(), tb);
                None
            }
            _ => None,
        }
    }

    fn solve(mut self, preferred: &BTreeSet<Name>) -> Result<Substitution, UnifyError> {
        let names: Vec<Name> = self.parent.keys().cloned().collect();
        let mut members: BTreeMap<Name, Vec<Name>> = BTreeMap::new();
        for n in &names {
            let r = self.find(n);
            members.entry(r).or_default().push(n.clone());
        }
        // Representative name of every unbound class.
        let mut rep: BTreeMap<Name, Name> = BTreeMap::new();
        for (root, ms) in &members {
            if !self.term.contains_key(root) {
                let chosen = ms
                    .iter()
                    .filter(|m| preferred.contains(*m))
                    .min()
                    .or_else(|| ms.iter().min())
                    .expect("non-empty class")
                    .clone();
                rep.insert(root.clone(), chosen);
            }
        }
        let mut resolved: BTreeMap<Name, Term> = BTreeMap::new();
        let roots: Vec<Name> = members.keys().cloned().collect();
        for r in &roots {
            let mut visiting = BTreeSet::new();
            self.resolve(r, &rep, &mut resolved, &mut visiting)?;
        }
        let mut out = Substitution::new();
        for (root, ms) in &members {
            let t = &resolved[root];
            for m in ms {
                out.insert(m.clone(), t.clone());
            }
        }
        Ok(out)
    }

    fn resolve(
        &mut self,
        root: &Name,
        rep: &BTreeMap<Name, Name>,
        done: &mut BTreeMap<Name, Term>,
        visiting: &mut BTreeSet<Name>,
    ) -> Result<Term, UnifyError> {
        if let Some(t) = done.get(root) {
            return Ok(t.clone());
        }
        let t = match self.term.get(root).cloned() {
            None => Term::Var(rep[root].clone()),
            Some(t) => {
                if !visiting.insert(root.clone()) {
                    return Err(UnifyError::Occurs(root.clone(), t));
                }
                let r = self.resolve_term(&t, rep, done, visiting);
                visiting.remove(root);
                match r {
                    Ok(t) => t,
                    Err(UnifyError::Occurs(_, _)) => return Err(UnifyError::Occurs(rep_or(root, rep), t)),
                    Err(e) => return Err(e),
                }
            }
        };
        done.insert(root.clone(), t.clone());
        Ok(t)
    }

    fn resolve_term(
        &mut self,
        t: &Term,
        rep: &BTreeMap<Name, Name>,
        done: &mut BTreeMap<Name, Term>,
        visiting: &mut BTreeSet<Name>,
    ) -> Result<Term, UnifyError> {
        match t {
            Term::Var(x) => {
                let r = self.find(x);
                self.resolve(&r, rep, done, visiting)
            }
            Term::App(f, args) => {
                let mut out = Vec::with_capacity(args.len());
                for a in args {
                    out.push(self.resolve_term(a, rep, done, visiting)?);
                }
                Ok(Term::App(f.clone(), out))
            }
        }
    }
}

fn rep_or(root: &Name, rep: &BTreeMap<Name, Name>) -> Name {
    rep.get(root).cloned().unwrap_or_else(|| root.clone())
}

/// `mgu` with no preferred names.
pub fn mgu_plain(eqs: &EquationSet) -> Result<Substitution, UnifyError> {
    mgu(eqs, &BTreeSet::new())
}

/// Whether `s` makes both sides of every equation equal.
pub fn unifies(s: &Substitution, eqs: &EquationSet) -> bool {
    eqs.iter().all(|(a, b)| s.apply(a) == s.apply(b))
}

pub fn eqs_vars(eqs: &EquationSet) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    for (a, b) in eqs {
        a.collect_vars(&mut out);
        b.collect_vars(&mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Term {
        Term::var(s)
    }
    fn n(s: &str) -> Name {
        Name::from(s)
    }
    fn set(xs: &[&str]) -> BTreeSet<Name> {
        xs.iter().map(|x| n(x)).collect()
    }

    #[test]
    fn preferred_name_becomes_representative() {
        let s = mgu(&vec![(v("x"), v("y")), (v("y"), v("z"))], &set(&["z"])).unwrap();
        assert_eq!(s, Substitution::renaming([(n("x"), n("z")), (n("y"), n("z"))]));
    }

    #[test]
    fn least_name_without_preference() {
        let s = mgu_plain(&vec![(v("y"), v("x"))]).unwrap();
        assert_eq!(s, Substitution::renaming([(n("y"), n("x"))]));
    }

    #[test]
    fn binds_compound_terms() {
        let eq = (Term::app("f", vec![v("x")]), v("y"));
        let s = mgu_plain(&vec![eq]).unwrap();
        assert_eq!(s.apply_name(&n("y")), Term::app("f", vec![v("x")]));
        assert!(s.is_idempotent());
    }

    #[test]
    fn clash_and_occurs() {
        let e = mgu_plain(&vec![(Term::app("f", vec![v("x")]), Term::app("g", vec![v("x")]))]);
        assert!(matches!(e, Err(UnifyError::Clash(..))));
        let e = mgu_plain(&vec![(v("x"), Term::app("f", vec![v("x")]))]);
        assert!(matches!(e, Err(UnifyError::Occurs(..))));
    }

    #[test]
    fn indirect_occurs_is_caught() {
        let eqs = vec![(v("x"), Term::app("f", vec![v("y")])), (v("y"), Term::app("g", vec![v("x")]))];
        assert!(matches!(mgu_plain(&eqs), Err(UnifyError::Occurs(..))));
    }

    #[test]
    fn compose_chains_renamings() {
        let s1 = Substitution::renaming([(n("x"), n("y"))]);
        let s2 = Substitution::renaming([(n("y"), n("z"))]);
        let c = compose(&s1, &s2);
        assert_eq!(c, Substitution::renaming([(n("x"), n("z")), (n("y"), n("z"))]));
        assert!(c.is_idempotent());
    }

    #[test]
    fn eqn_rejects_compound_images() {
        let s = Substitution::from_pairs([(n("x"), Term::app("f", vec![v("y")]))]);
        assert!(eqn(&s).is_err());
        let r = Substitution::renaming([(n("x"), n("y"))]);
        assert_eq!(eqn(&r).unwrap(), vec![(v("x"), v("y"))]);
    }

    #[test]
    fn mgu_result_is_idempotent_and_unifies() {
        let eqs = vec![
            (Term::app("f", vec![v("x"), v("y")]), Term::app("f", vec![v("y"), Term::app("g", vec![v("z")])])),
            (v("w"), v("z")),
        ];
        let s = mgu_plain(&eqs).unwrap();
        assert!(s.is_idempotent());
        assert!(unifies(&s, &eqs));
    }
}
