use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::name::{FreshGen, Name};

/// Recursion variable.
pub type AgentVar = Arc<str>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Prefix {
    Input { chan: Name, args: Vec<Name> },
    Output { chan: Name, args: Vec<Name> },
    Fusion(Vec<(Name, Name)>),
}

impl Prefix {
    pub fn names(&self) -> Vec<Name> {
        match self {
            Prefix::Input { chan, args } | Prefix::Output { chan, args } => {
                std::iter::once(chan.clone()).chain(args.iter().cloned()).collect()
            }
            Prefix::Fusion(pairs) => pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect(),
        }
    }

    pub fn map_names(&self, f: &mut impl FnMut(&Name) -> Name) -> Prefix {
        match self {
            Prefix::Input { chan, args } => Prefix::Input { chan: f(chan), args: args.iter().map(&mut *f).collect() },
            Prefix::Output { chan, args } => Prefix::Output { chan: f(chan), args: args.iter().map(&mut *f).collect() },
            Prefix::Fusion(pairs) => Prefix::Fusion(pairs.iter().map(|(a, b)| (f(a), f(b))).collect()),
        }
    }

    pub fn arity(&self) -> Option<usize> {
        match self {
            Prefix::Input { args, .. } | Prefix::Output { args, .. } => Some(args.len()),
            Prefix::Fusion(_) => None,
        }
    }
}

/// Fusion calculus agents.
///
/// `Const` is an inert sequential agent with a name and free names, used to
/// stand for an unspecified continuation such as `Q(x, y, z)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Agent {
    Nil,
    Sum(Vec<(Prefix, Agent)>),
    Const(Arc<str>, Vec<Name>),
    Par(Box<Agent>, Box<Agent>),
    Scope(Name, Box<Agent>),
    Rec(AgentVar, Box<Agent>),
    Var(AgentVar),
}

impl Agent {
    pub fn prefixed(p: Prefix, cont: Agent) -> Agent {
        Agent::Sum(vec![(p, cont)])
    }

    pub fn par(a: Agent, b: Agent) -> Agent {
        Agent::Par(Box::new(a), Box::new(b))
    }

    pub fn scope(x: Name, body: Agent) -> Agent {
        Agent::Scope(x, Box::new(body))
    }

    /// Right-nested parallel composition, `0` for an empty list.
    pub fn par_all(items: impl IntoIterator<Item = Agent>) -> Agent {
        let mut items: Vec<Agent> = items.into_iter().collect();
        let mut acc = match items.pop() {
            None => return Agent::Nil,
            Some(a) => a,
        };
        while let Some(a) = items.pop() {
            acc = Agent::par(a, acc);
        }
        acc
    }

    pub fn scope_all(names: &[Name], body: Agent) -> Agent {
        names.iter().rev().fold(body, |acc, x| Agent::scope(x.clone(), acc))
    }

    /// Sequential agents are guarded sums and constants.
    pub fn is_sequential(&self) -> bool {
        matches!(self, Agent::Sum(_) | Agent::Const(..))
    }

    pub fn free_names(&self) -> BTreeSet<Name> {
        self.free_occurrences().into_iter().collect()
    }

    /// Free name occurrences in left-to-right pre-order.
    pub fn free_occurrences(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.visit_occurrences(&mut Vec::new(), &mut |n| {
            out.push(n.clone());
            n.clone()
        });
        out
    }

    /// Rewrites every free occurrence in pre-order with `f`.
    pub fn map_free_occurrences(&self, f: &mut impl FnMut(&Name) -> Name) -> Agent {
        self.visit_occurrences(&mut Vec::new(), f)
    }

    fn visit_occurrences(&self, bound: &mut Vec<Name>, f: &mut impl FnMut(&Name) -> Name) -> Agent {
        fn occ(n: &Name, bound: &[Name], f: &mut impl FnMut(&Name) -> Name) -> Name {
            if bound.contains(n) {
                n.clone()
            } else {
                f(n)
            }
        }
        match self {
            Agent::Nil => Agent::Nil,
            Agent::Var(x) => Agent::Var(x.clone()),
            Agent::Const(c, args) => Agent::Const(c.clone(), args.iter().map(|a| occ(a, bound, f)).collect()),
            Agent::Sum(branches) => {
                let mut out = Vec::with_capacity(branches.len());
                for (p, cont) in branches {
                    let p2 = p.map_names(&mut |n| occ(n, bound, f));
                    out.push((p2, cont.visit_occurrences(bound, f)));
                }
                Agent::Sum(out)
            }
            Agent::Par(a, b) => {
                let a2 = a.visit_occurrences(bound, f);
                let b2 = b.visit_occurrences(bound, f);
                Agent::par(a2, b2)
            }
            Agent::Scope(x, body) => {
                bound.push(x.clone());
                let b2 = body.visit_occurrences(bound, f);
                bound.pop();
                Agent::scope(x.clone(), b2)
            }
            Agent::Rec(v, body) => Agent::Rec(v.clone(), Box::new(body.visit_occurrences(bound, f))),
        }
    }

    /// Every name in the agent, bound or free.
    pub fn all_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_all_names(&mut out);
        out
    }

    fn collect_all_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Agent::Nil | Agent::Var(_) => {}
            Agent::Const(_, args) => out.extend(args.iter().cloned()),
            Agent::Sum(bs) => {
                for (p, c) in bs {
                    out.extend(p.names());
                    c.collect_all_names(out);
                }
            }
            Agent::Par(a, b) => {
                a.collect_all_names(out);
                b.collect_all_names(out);
            }
            Agent::Scope(x, b) => {
                out.insert(x.clone());
                b.collect_all_names(out);
            }
            Agent::Rec(_, b) => b.collect_all_names(out),
        }
    }

    pub fn free_agent_vars(&self) -> BTreeSet<AgentVar> {
        match self {
            Agent::Nil | Agent::Const(..) => BTreeSet::new(),
            Agent::Var(x) => [x.clone()].into(),
            Agent::Sum(bs) => bs.iter().flat_map(|(_, c)| c.free_agent_vars()).collect(),
            Agent::Par(a, b) => a.free_agent_vars().union(&b.free_agent_vars()).cloned().collect(),
            Agent::Scope(_, b) => b.free_agent_vars(),
            Agent::Rec(x, b) => {
                let mut s = b.free_agent_vars();
                s.remove(x);
                s
            }
        }
    }

    /// Capture-avoiding name substitution.
    pub fn subst(&self, s: &BTreeMap<Name, Name>, gen: &mut FreshGen) -> Agent {
        if s.is_empty() {
            return self.clone();
        }
        let rn = |n: &Name, s: &BTreeMap<Name, Name>| s.get(n).cloned().unwrap_or_else(|| n.clone());
        match self {
            Agent::Nil => Agent::Nil,
            Agent::Var(x) => Agent::Var(x.clone()),
            Agent::Const(c, args) => Agent::Const(c.clone(), args.iter().map(|a| rn(a, s)).collect()),
            Agent::Sum(bs) => {
                Agent::Sum(bs.iter().map(|(p, c)| (p.map_names(&mut |n| rn(n, s)), c.subst(s, gen))).collect())
            }
            Agent::Par(a, b) => Agent::par(a.subst(s, gen), b.subst(s, gen)),
            Agent::Rec(v, b) => Agent::Rec(v.clone(), Box::new(b.subst(s, gen))),
            Agent::Scope(x, body) => {
                let mut inner = s.clone();
                inner.remove(x);
                let fv = body.free_names();
                let captures = inner.iter().any(|(k, v)| v == x && fv.contains(k) && k != x);
                if captures {
                    let y = gen.fresh_like(x);
                    let mut r = BTreeMap::new();
                    r.insert(x.clone(), y.clone());
                    let renamed = body.subst(&r, gen);
                    Agent::scope(y, renamed.subst(&inner, gen))
                } else {
                    Agent::scope(x.clone(), body.subst(&inner, gen))
                }
            }
        }
    }

    /// Replaces free occurrences of the agent variable `x` with `by`,
    /// renaming binders that would capture free names of `by`.
    pub fn subst_agent_var(&self, x: &AgentVar, by: &Agent, gen: &mut FreshGen) -> Agent {
        let fv = by.free_names();
        self.subst_agent_var_inner(x, by, &fv, gen)
    }

    fn subst_agent_var_inner(&self, x: &AgentVar, by: &Agent, fv: &BTreeSet<Name>, gen: &mut FreshGen) -> Agent {
        match self {
            Agent::Nil | Agent::Const(..) => self.clone(),
            Agent::Var(y) if y == x => by.clone(),
            Agent::Var(_) => self.clone(),
            Agent::Sum(bs) => {
                Agent::Sum(bs.iter().map(|(p, c)| (p.clone(), c.subst_agent_var_inner(x, by, fv, gen))).collect())
            }
            Agent::Par(a, b) => {
                Agent::par(a.subst_agent_var_inner(x, by, fv, gen), b.subst_agent_var_inner(x, by, fv, gen))
            }
            Agent::Rec(y, _) if y == x => self.clone(),
            Agent::Rec(y, b) => Agent::Rec(y.clone(), Box::new(b.subst_agent_var_inner(x, by, fv, gen))),
            Agent::Scope(n, body) => {
                if fv.contains(n) && body.free_agent_vars().contains(x) {
                    let m = gen.fresh_like(n);
                    let renamed = body.subst(&[(n.clone(), m.clone())].into(), gen);
                    Agent::scope(m, renamed.subst_agent_var_inner(x, by, fv, gen))
                } else {
                    Agent::scope(n.clone(), body.subst_agent_var_inner(x, by, fv, gen))
                }
            }
        }
    }

    /// One unfolding of `rec X.P` into `P{rec X.P / X}`.
    pub fn unfold(&self, gen: &mut FreshGen) -> Option<Agent> {
        match self {
            Agent::Rec(x, body) => Some(body.subst_agent_var(x, self, gen)),
            _ => None,
        }
    }

    fn is_unit(&self) -> bool {
        match self {
            Agent::Sum(bs) => bs.len() == 1,
            Agent::Par(..) => false,
            _ => true,
        }
    }
}

fn write_names(f: &mut fmt::Formatter<'_>, names: &[Name]) -> fmt::Result {
    for (i, n) in names.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{n}")?;
    }
    Ok(())
}

impl fmt::Display for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prefix::Input { chan, args } => {
                write!(f, "{chan}<")?;
                write_names(f, args)?;
                f.write_str(">")
            }
            Prefix::Output { chan, args } => {
                write!(f, "'{chan}<")?;
                write_names(f, args)?;
                f.write_str(">")
            }
            Prefix::Fusion(pairs) => {
                f.write_str("{")?;
                for (i, (a, b)) in pairs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}={b}")?;
                }
                f.write_str("}")
            }
        }
    }
}

impl Agent {
    fn fmt_unit(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            write!(f, "{self}")
        } else {
            write!(f, "({self})")
        }
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Agent::Nil => f.write_str("0"),
            Agent::Var(x) => f.write_str(x),
            Agent::Const(c, args) => {
                write!(f, "{c}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Agent::Sum(bs) => {
                for (i, (p, c)) in bs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{p}.")?;
                    c.fmt_unit(f)?;
                }
                Ok(())
            }
            Agent::Par(a, b) => {
                match **a {
                    Agent::Par(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                write!(f, " | {b}")
            }
            Agent::Scope(..) => {
                let mut names = Vec::new();
                let mut cur = self;
                while let Agent::Scope(x, b) = cur {
                    names.push(x.clone());
                    cur = b;
                }
                f.write_str("(")?;
                write_names(f, &names)?;
                f.write_str(")")?;
                cur.fmt_unit(f)
            }
            Agent::Rec(x, b) => {
                write!(f, "rec {x}.")?;
                b.fmt_unit(f)
            }
        }
    }
}
