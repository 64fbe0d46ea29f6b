use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use super::syntax::{Clause, Goal, Program};
use crate::name::{FreshGen, Name};
use crate::term::{compose, mgu, Substitution, UnifyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SldError {
    #[error("goal has no atom {0}")]
    NoAtom(usize),
    #[error("program has no clause {0}")]
    NoClause(usize),
    #[error("predicate {goal} does not match clause head {head}")]
    PredicateMismatch { goal: String, head: String },
    #[error(transparent)]
    Unify(#[from] UnifyError),
}

/// One resolution step.
#[derive(Clone, Debug, Serialize)]
pub struct SmallStep {
    /// Position of the rewritten atom in the goal before the step.
    pub atom: usize,
    pub clause: usize,
    /// The clause variant that was used.
    pub variant: Clause,
    pub theta: Substitution,
    pub next: Goal,
}

/// A variant of `c` whose variables are all fresh for `gen`.
pub fn fresh_variant(c: &Clause, gen: &mut FreshGen) -> Clause {
    let rho = Substitution::renaming(c.vars().iter().map(|v| (v.clone(), gen.fresh_like(v))));
    c.apply(&rho)
}

/// Resolves atom `atom` of `goal` with a fresh variant of clause `clause`.
/// Variables of the goal are preferred as representatives, so `θ` sends
/// clause variables to goal variables where it can.
pub fn sld_step(
    goal: &Goal,
    program: &Program,
    atom: usize,
    clause: usize,
    gen: &mut FreshGen,
) -> Result<SmallStep, SldError> {
    let a = goal.atoms.get(atom).ok_or(SldError::NoAtom(atom))?;
    let c = program.clauses.get(clause).ok_or(SldError::NoClause(clause))?;
    if a.pred != c.head.pred || a.args.len() != c.head.args.len() {
        return Err(SldError::PredicateMismatch { goal: a.to_string(), head: c.head.to_string() });
    }
    gen.avoid(goal.vars().iter());
    let variant = fresh_variant(c, gen);
    let theta = mgu(&vec![(a.as_term(), variant.head.as_term())], &goal.vars())?;
    let mut atoms = Vec::with_capacity(goal.len() + variant.body.len());
    atoms.extend(goal.atoms[..atom].iter().map(|b| b.apply(&theta)));
    atoms.extend(variant.body.atoms.iter().map(|b| b.apply(&theta)));
    atoms.extend(goal.atoms[atom + 1..].iter().map(|b| b.apply(&theta)));
    Ok(SmallStep { atom, clause, variant, theta, next: Goal { atoms } })
}

/// Outcome of replaying a selection as a sequence of small steps.
#[derive(Clone, Debug)]
pub struct Replay {
    pub theta: Substitution,
    pub end: Goal,
    pub trace: Vec<SmallStep>,
}

/// Applies `selection[i]` to atom `i` of `start`, visiting the atoms in
/// `order`. Fails when a step fails, when the end goal keeps a function
/// symbol, or when a start variable is bound to a nested term, which would
/// be a synchronization on a structured action.
pub fn replay_in_order(
    start: &Goal,
    program: &Program,
    selection: &[Option<usize>],
    order: &[usize],
) -> Option<Replay> {
    let mut gen = FreshGen::avoiding(start.vars().iter().chain(program.vars().iter()));
    // Current position of every start atom.
    let mut pos: Vec<usize> = (0..start.len()).collect();
    let mut goal = start.clone();
    let mut theta = Substitution::new();
    let mut trace = Vec::new();
    for &i in order {
        let Some(c) = selection.get(i).copied().flatten() else { continue };
        let step = sld_step(&goal, program, pos[i], c, &mut gen).ok()?;
        let grown = step.variant.body.len();
        for p in pos.iter_mut() {
            if *p > step.atom {
                *p = *p + grown - 1;
            }
        }
        theta = compose(&theta, &step.theta);
        goal = step.next.clone();
        trace.push(step);
    }
    if !goal.is_graph() {
        return None;
    }
    let keep: BTreeSet<Name> = start.vars();
    let theta = theta.restrict(&keep);
    if theta.iter().any(|(_, t)| t.depth() > 1) {
        return None;
    }
    Some(Replay { theta, end: goal, trace })
}

/// Replay in ascending atom order.
pub fn replay(start: &Goal, program: &Program, selection: &[Option<usize>]) -> Option<Replay> {
    let order: Vec<usize> = (0..start.len()).collect();
    replay_in_order(start, program, selection, &order)
}
