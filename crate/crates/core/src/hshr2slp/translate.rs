use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::hshr::{Act, Edge, Judgement, NotInjective, Production, Transition};
use crate::name::{FreshGen, Name};
use crate::slp::{validate_clause, Atom, Clause, Goal, Program, Violation};
use crate::term::{Substitution, Term};

/// Action used on a node a clause disconnects from without synchronizing.
pub const FOO: &str = "foo";

/// `⟦Γ ⊢ G⟧`: one atom per edge. The node set is dropped.
pub fn translate_judgement(j: &Judgement) -> Goal {
    Goal { atoms: j.edges.iter().map(|e| Atom::of_names(&e.label, &e.att)).collect() }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{atom} is not function-free")]
pub struct NotGoalGraph {
    pub atom: String,
}

/// Inverse of [`translate_judgement`], with the variables as node set.
pub fn goal_to_judgement(g: &Goal) -> Result<Judgement, NotGoalGraph> {
    let mut edges = Vec::with_capacity(g.len());
    for a in &g.atoms {
        let att = a.var_args().ok_or_else(|| NotGoalGraph { atom: a.to_string() })?;
        edges.push(Edge { label: Arc::clone(&a.pred), att });
    }
    Ok(Judgement::with_attached([], edges))
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ClauseOptions {
    /// Rewrite a bare head variable missing from the body into `foo(x)`.
    pub foo_convention: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("clause {clause} is not synchronized: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct NotSynchronized {
    pub clause: String,
    pub violations: Vec<Violation>,
}

/// `L(a1(x1π, y1), …, an(xnπ, yn)) ← ⟦G⟧`, with `xiπ` alone for ε.
pub fn translate_production(p: &Production, opts: ClauseOptions) -> Result<Clause, NotSynchronized> {
    let args: Vec<Term> = p
        .lhs
        .att
        .iter()
        .map(|x| {
            let xp = Term::Var(p.label.pi_of(x));
            match p.label.act(x) {
                Act::Eps => xp,
                Act::Do(a, ys) => Term::App(a, std::iter::once(xp).chain(ys.into_iter().map(Term::Var)).collect()),
            }
        })
        .collect();
    let mut clause = Clause {
        name: p.name.clone(),
        head: Atom { pred: p.lhs.label.clone(), args },
        body: translate_judgement(&p.target),
    };
    let mut violations = validate_clause(&clause);
    if opts.foo_convention && !violations.is_empty() {
        for v in &violations {
            if let Violation::HeadVarNotInBody { arg, var } = v {
                clause.head.args[arg - 1] = Term::app(FOO, vec![Term::Var(var.clone())]);
            }
        }
        violations = validate_clause(&clause);
    }
    if violations.is_empty() {
        Ok(clause)
    } else {
        Err(NotSynchronized { clause: clause.to_string(), violations })
    }
}

/// Clauses in production order, so clause `i` translates production `i`.
pub fn translate_productions(ps: &[Arc<Production>], opts: ClauseOptions) -> Result<Program, NotSynchronized> {
    Ok(Program { clauses: ps.iter().map(|p| translate_production(p, opts)).collect::<Result<_, _>>()? })
}

/// `θ_ρ` together with the renaming `ρ` it was built from.
#[derive(Clone, Debug, Serialize)]
pub struct AssociatedSubstitution {
    pub theta: Substitution,
    pub rho: BTreeMap<Name, Name>,
}

/// Identity on ε-labelled source nodes, fresh primed copies in name order
/// everywhere else.
pub fn canonical_rho(t: &Transition) -> BTreeMap<Name, Name> {
    let names = t.all_names();
    let mut gen = FreshGen::avoiding(names.iter());
    names
        .into_iter()
        .map(|n| {
            let keep = t.source.nodes.contains(&n) && t.label.act(&n).is_eps();
            let m = if keep { n.clone() } else { gen.fresh_like(&n) };
            (n, m)
        })
        .collect()
}

/// `{a(xπρ, yρ)/x | Λ(x) = (a, y)} ∪ {xπρ/x | Λ(x) = ε}`, identities
/// dropped. Without `rho`, [`canonical_rho`] is used.
pub fn associated_substitution(
    t: &Transition,
    rho: Option<&BTreeMap<Name, Name>>,
) -> Result<AssociatedSubstitution, NotInjective> {
    let rho = rho.cloned().unwrap_or_else(|| canonical_rho(t));
    let mut back: BTreeMap<&Name, &Name> = BTreeMap::new();
    for (k, v) in &rho {
        if let Some(prev) = back.insert(v, k) {
            return Err(NotInjective(prev.clone(), k.clone(), v.clone()));
        }
    }
    let r = |n: &Name| rho.get(n).cloned().unwrap_or_else(|| n.clone());
    let mut theta = Substitution::new();
    for x in &t.source.nodes {
        let xpr = Term::Var(r(&t.label.pi_of(x)));
        let image = match t.label.act(x) {
            Act::Eps => xpr,
            Act::Do(a, ys) => Term::App(a, std::iter::once(xpr).chain(ys.iter().map(|y| Term::Var(r(y)))).collect()),
        };
        theta.insert(x.clone(), image);
    }
    Ok(AssociatedSubstitution { theta, rho })
}
