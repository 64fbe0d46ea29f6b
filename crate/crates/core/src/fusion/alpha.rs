//! Structural congruence up to a bounded number of recursion unfoldings.
//!
//! Both sides are brought to normal form level by level. Restricted names at
//! each level may be matched with any restricted name at the same level on
//! the other side, components and summands are matched as multisets, and
//! unmatched free names must coincide.

use std::collections::{BTreeMap, BTreeSet};

use super::ast::{Agent, AgentVar, Prefix};
use super::normal::normalize_items;
use super::normal::NormalForm;
use crate::name::Name;

/// Default number of one-sided recursion unfoldings.
pub const DEFAULT_UNFOLD_DEPTH: usize = 2;

pub fn alpha_equal(a: &Agent, b: &Agent) -> bool {
    alpha_equal_with_depth(a, b, DEFAULT_UNFOLD_DEPTH)
}

pub fn alpha_equal_with_depth(a: &Agent, b: &Agent, depth: usize) -> bool {
    let mut env = Env::default();
    match_agent(a, b, &mut env, depth)
}

#[derive(Clone, Default)]
struct Frame {
    left: BTreeSet<Name>,
    right: BTreeSet<Name>,
    map: BTreeMap<Name, Name>,
    back: BTreeMap<Name, Name>,
}

#[derive(Clone, Default)]
struct Env {
    frames: Vec<Frame>,
    vars: Vec<(AgentVar, AgentVar)>,
}

impl Env {
    fn level_left(&self, n: &Name) -> Option<usize> {
        self.frames.iter().rposition(|f| f.left.contains(n))
    }

    fn level_right(&self, n: &Name) -> Option<usize> {
        self.frames.iter().rposition(|f| f.right.contains(n))
    }

    fn name(&mut self, a: &Name, b: &Name) -> bool {
        match (self.level_left(a), self.level_right(b)) {
            (None, None) => a == b,
            (Some(i), Some(j)) if i == j => {
                let f = &mut self.frames[i];
                match (f.map.get(a), f.back.get(b)) {
                    (Some(x), Some(y)) => x == b && y == a,
                    (None, None) => {
                        f.map.insert(a.clone(), b.clone());
                        f.back.insert(b.clone(), a.clone());
                        true
                    }
                    _ => false,
                }
            }
            _ => false,
        }
    }

    fn var(&self, a: &AgentVar, b: &AgentVar) -> bool {
        let ia = self.vars.iter().rposition(|(x, _)| x == a);
        let ib = self.vars.iter().rposition(|(_, y)| y == b);
        match (ia, ib) {
            (Some(i), Some(j)) => i == j,
            (None, None) => a == b,
            _ => false,
        }
    }
}

fn match_agent(a: &Agent, b: &Agent, env: &mut Env, depth: usize) -> bool {
    match (a, b) {
        (Agent::Var(x), Agent::Var(y)) => env.var(x, y),
        _ => match_levels(a, b, env, depth),
    }
}

/// Matches one level with `rec` components kept folded, then retries with
/// them unfolded while the depth budget lasts.
fn match_levels(a: &Agent, b: &Agent, env: &mut Env, depth: usize) -> bool {
    let mut trial = env.clone();
    if match_level(&normalize_items(a, false), &normalize_items(b, false), &mut trial, depth) {
        *env = trial;
        return true;
    }
    if depth == 0 {
        return false;
    }
    let (na, nb) = (normalize_items(a, true), normalize_items(b, true));
    let had_rec = |x: &NormalForm, y: &Agent| x != &normalize_items(y, false);
    if !had_rec(&na, a) && !had_rec(&nb, b) {
        return false;
    }
    match_level(&na, &nb, env, depth - 1)
}

fn match_level(na: &NormalForm, nb: &NormalForm, env: &mut Env, depth: usize) -> bool {
    if na.restricted.len() != nb.restricted.len() || na.sequentials.len() != nb.sequentials.len() {
        return false;
    }
    env.frames.push(Frame {
        left: na.restricted.iter().cloned().collect(),
        right: nb.restricted.iter().cloned().collect(),
        ..Frame::default()
    });
    let used = vec![false; nb.sequentials.len()];
    let ok = match_multiset(&na.sequentials, &nb.sequentials, 0, used, env, depth, &|x, y, e, d| match_seq(x, y, e, d));
    if ok {
        let f = env.frames.pop().expect("frame");
        f.map.len() == f.left.len()
    } else {
        env.frames.pop();
        false
    }
}

type Matcher<T> = dyn Fn(&T, &T, &mut Env, usize) -> bool;

fn match_multiset<T>(
    xs: &[T],
    ys: &[T],
    i: usize,
    used: Vec<bool>,
    env: &mut Env,
    depth: usize,
    m: &Matcher<T>,
) -> bool {
    if i == xs.len() {
        return true;
    }
    for j in 0..ys.len() {
        if used[j] {
            continue;
        }
        let mut trial = env.clone();
        if m(&xs[i], &ys[j], &mut trial, depth) {
            let mut u2 = used.clone();
            u2[j] = true;
            if match_multiset(xs, ys, i + 1, u2, &mut trial, depth, m) {
                *env = trial;
                return true;
            }
        }
    }
    false
}

fn match_seq(a: &Agent, b: &Agent, env: &mut Env, depth: usize) -> bool {
    match (a, b) {
        (Agent::Const(c, xs), Agent::Const(d, ys)) => {
            c == d && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| env.name(x, y))
        }
        (Agent::Var(x), Agent::Var(y)) => env.var(x, y),
        (Agent::Rec(x, ba), Agent::Rec(y, bb)) => {
            env.vars.push((x.clone(), y.clone()));
            let ok = match_agent(ba, bb, env, depth);
            env.vars.pop();
            ok
        }
        (Agent::Sum(xs), Agent::Sum(ys)) => {
            xs.len() == ys.len()
                && match_multiset(xs, ys, 0, vec![false; ys.len()], env, depth, &|(p, c), (q, d), e, k| {
                    match_prefix(p, q, e) && match_agent(c, d, e, k)
                })
        }
        _ => false,
    }
}

fn match_prefix(p: &Prefix, q: &Prefix, env: &mut Env) -> bool {
    let same_kind = matches!(
        (p, q),
        (Prefix::Input { .. }, Prefix::Input { .. })
            | (Prefix::Output { .. }, Prefix::Output { .. })
            | (Prefix::Fusion(_), Prefix::Fusion(_))
    );
    let (xs, ys) = (p.names(), q.names());
    same_kind && xs.len() == ys.len() && xs.iter().zip(&ys).all(|(x, y)| env.name(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::parse::parse_agent;

    fn eq(a: &str, b: &str) -> bool {
        alpha_equal(&parse_agent(a).unwrap(), &parse_agent(b).unwrap())
    }

    #[test]
    fn renaming_bound_names() {
        assert!(eq("(x)a<x>.0", "(y)a<y>.0"));
        assert!(!eq("(x)a<x>.0", "(y)a<b>.0"));
        assert!(!eq("a<x>.0", "a<y>.0"));
    }

    #[test]
    fn monoid_and_scope_laws() {
        assert!(eq("a.0 | b.0", "b.0 | a.0 | 0"));
        assert!(eq("(x)(a<x>.0 | b.0)", "b.0 | (x)a<x>.0"));
        assert!(eq("a.0 + b.0", "b.0 + a.0"));
        assert!(eq("(x)(y)'x<y>.0", "(y)(x)'x<y>.0"));
        assert!(eq("(x)0 | a.0", "a.0"));
    }

    #[test]
    fn scope_under_prefix() {
        assert!(eq("c.(x)(a<x>.0 | b.0)", "c.(b.0 | (z)a<z>.0)"));
    }

    #[test]
    fn one_unfolding() {
        assert!(eq("rec X.a.X", "a.rec X.a.X"));
        assert!(eq("rec X.a.X", "rec Y.a.Y"));
        assert!(!eq("rec X.a.X", "rec Y.b.Y"));
    }

    #[test]
    fn distinguishes_identification_of_bound_names() {
        assert!(!eq("(x y)'a<x y>.0", "(x)'a<x x>.0"));
        assert!(eq("(x y)('a<x>.0 | 'b<y>.0)", "(p q)('b<q>.0 | 'a<p>.0)"));
        assert!(!eq("(x y)('a<x>.0 | 'b<y>.0)", "(p)('b<p>.0 | 'a<p>.0)"));
    }
}
