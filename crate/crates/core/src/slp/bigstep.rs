use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use super::equal::observably_equal;
use super::sld::{fresh_variant, replay, SmallStep};
use super::syntax::{Atom, Goal, Program};
use crate::name::{FreshGen, Name};
use crate::term::{mgu, EquationSet, Substitution, Symbol, Term};

/// A transaction rewriting distinct atoms of a goal-graph into a goal-graph.
#[derive(Clone, Debug, Serialize)]
pub struct BigStep {
    pub start: Goal,
    pub end: Goal,
    /// Observable substitution, restricted to the variables of `start`.
    pub theta: Substitution,
    /// Clause chosen for each start atom, if any.
    pub selection: Vec<Option<usize>>,
    /// Rewritten start atoms, ascending.
    pub rewritten: Vec<usize>,
    /// Small steps of the replay in ascending atom order.
    pub trace: Vec<SmallStep>,
}

impl BigStep {
    pub fn is_empty(&self) -> bool {
        self.rewritten.is_empty()
    }

    /// Equality up to injective renaming of the variables not in `start`.
    pub fn equivalent(&self, other: &BigStep) -> bool {
        self.start == other.start
            && observably_equal(&self.start.vars(), (&self.theta, &self.end), (&other.theta, &other.end))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BigStepError {
    #[error("start goal {0} contains function symbols")]
    NotGoalGraph(String),
    #[error("selection has {got} entries for {expected} atoms")]
    SelectionLength { expected: usize, got: usize },
    #[error("selection refers to clause {0}, which does not exist")]
    NoClause(usize),
    #[error("closed form and small-step replay disagree on selection {selection:?}")]
    Disagreement { selection: Vec<Option<usize>> },
    #[error("more than {0} selections to explore")]
    TooMany(usize),
}

#[derive(Clone, Copy, Debug)]
pub struct BigStepOptions {
    /// Drop the empty big-step.
    pub nonempty: bool,
    /// Bound on complete selections explored during enumeration.
    pub max_selections: usize,
}

impl Default for BigStepOptions {
    fn default() -> BigStepOptions {
        BigStepOptions { nonempty: false, max_selections: 1_000_000 }
    }
}

/// Pruning hook over the clause choices made so far for a prefix of the
/// atoms. The flag tells whether the selection is complete.
pub type SelectionAdmit<'a> = dyn Fn(&[Option<usize>], bool) -> bool + Sync + 'a;

pub fn admit_any(_: &[Option<usize>], _: bool) -> bool {
    true
}

/// Functor and arity of a head argument, `None` for a variable.
fn head_action(t: &Term) -> Option<(Symbol, usize)> {
    match t {
        Term::Var(_) => None,
        Term::App(f, args) => Some((f.clone(), args.len())),
    }
}

/// The big-step for a fixed selection, computed in closed form: the
/// representatives come from the mgu of the equations between head
/// arguments meeting at a shared variable, and a big-step exists exactly
/// when every variable meets a single action, or none at all.
pub fn closed_form(start: &Goal, program: &Program, selection: &[Option<usize>]) -> Option<(Substitution, Goal)> {
    let mut gen = FreshGen::avoiding(start.vars().iter().chain(program.vars().iter()));
    let mut variants = Vec::with_capacity(start.len());
    for (a, sel) in start.atoms.iter().zip(selection) {
        variants.push(match sel {
            Some(c) => {
                let v = fresh_variant(&program.clauses[*c], &mut gen);
                if v.head.pred != a.pred || v.head.args.len() != a.args.len() {
                    return None;
                }
                Some(v)
            }
            None => None,
        });
    }
    // Occurrences of every start variable, with the head argument met there.
    let mut occ: BTreeMap<Name, Vec<Option<&Term>>> = BTreeMap::new();
    for (a, v) in start.atoms.iter().zip(&variants) {
        for (j, t) in a.args.iter().enumerate() {
            let x = t.as_var()?.clone();
            occ.entry(x).or_default().push(v.as_ref().map(|c| &c.head.args[j]));
        }
    }
    let mut eqs: EquationSet = Vec::new();
    let mut defined: BTreeMap<Name, &Term> = BTreeMap::new();
    for (x, heads) in &occ {
        let act = |h: &Option<&Term>| h.and_then(head_action);
        if heads.iter().any(|h| act(h) != act(&heads[0])) {
            return None;
        }
        let met: Vec<&Term> = heads.iter().flatten().copied().collect();
        match met.first() {
            Some(Term::App(_, args0)) => {
                for t in &met[1..] {
                    if let Term::App(_, args) = t {
                        eqs.extend(args0.iter().cloned().zip(args.iter().cloned()));
                    }
                }
                defined.insert(x.clone(), met[0]);
            }
            _ => eqs.extend(met.iter().map(|t| (Term::Var(x.clone()), (*t).clone()))),
        }
    }
    let keep = start.vars();
    let rep = mgu(&eqs, &keep).ok()?;
    let mut theta = Substitution::new();
    for x in occ.keys() {
        match defined.get(x) {
            Some(t) => theta.insert(x.clone(), rep.apply(t)),
            None => theta.insert(x.clone(), rep.apply_name(x)),
        }
    }
    let mut atoms: Vec<Atom> = Vec::new();
    for (a, v) in start.atoms.iter().zip(&variants) {
        match v {
            Some(c) => atoms.extend(c.body.atoms.iter().map(|b| b.apply(&rep))),
            None => atoms.push(a.apply(&rep)),
        }
    }
    let end = Goal { atoms };
    end.is_graph().then_some((theta, end))
}

fn check_selection(start: &Goal, program: &Program, selection: &[Option<usize>]) -> Result<(), BigStepError> {
    if !start.is_graph() {
        return Err(BigStepError::NotGoalGraph(start.to_string()));
    }
    if selection.len() != start.len() {
        return Err(BigStepError::SelectionLength { expected: start.len(), got: selection.len() });
    }
    match selection.iter().flatten().find(|c| **c >= program.clauses.len()) {
        Some(c) => Err(BigStepError::NoClause(*c)),
        None => Ok(()),
    }
}

/// The big-step for one selection, if it commits. The closed form is checked
/// against a small-step replay.
pub fn big_step_for(
    start: &Goal,
    program: &Program,
    selection: &[Option<usize>],
) -> Result<Option<BigStep>, BigStepError> {
    check_selection(start, program, selection)?;
    let closed = closed_form(start, program, selection);
    let replayed = replay(start, program, selection);
    let keep = start.vars();
    match (closed, replayed) {
        (None, None) => Ok(None),
        (Some((theta, end)), Some(r)) if observably_equal(&keep, (&theta, &end), (&r.theta, &r.end)) => {
            Ok(Some(BigStep {
                start: start.clone(),
                end,
                theta,
                selection: selection.to_vec(),
                rewritten: (0..selection.len()).filter(|&i| selection[i].is_some()).collect(),
                trace: r.trace,
            }))
        }
        _ => Err(BigStepError::Disagreement { selection: selection.to_vec() }),
    }
}

/// All big-steps from `start`, one per committing selection, in
/// lexicographic order of selections with "untouched" first. With a
/// selection, only that one is tried.
pub fn big_steps(
    start: &Goal,
    program: &Program,
    selection: Option<&[Option<usize>]>,
    opts: BigStepOptions,
) -> Result<Vec<BigStep>, BigStepError> {
    big_steps_with(start, program, selection, &admit_any, opts)
}

/// As [`big_steps`], keeping only selections accepted by `admit`.
pub fn big_steps_with(
    start: &Goal,
    program: &Program,
    selection: Option<&[Option<usize>]>,
    admit: &SelectionAdmit<'_>,
    opts: BigStepOptions,
) -> Result<Vec<BigStep>, BigStepError> {
    let selections = match selection {
        Some(s) => vec![s.to_vec()],
        None => {
            check_selection(start, program, &vec![None; start.len()])?;
            consistent_selections(start, program, admit, opts.max_selections)?
        }
    };
    let mut out = Vec::new();
    for s in selections {
        if opts.nonempty && s.iter().all(Option::is_none) {
            continue;
        }
        if let Some(b) = big_step_for(start, program, &s)? {
            out.push(b);
        }
    }
    Ok(out)
}

/// Selections where no start variable meets two different actions, or an
/// action and an untouched atom. Other failures are left to the closed form.
fn consistent_selections(
    start: &Goal,
    program: &Program,
    admit: &SelectionAdmit<'_>,
    max: usize,
) -> Result<Vec<Vec<Option<usize>>>, BigStepError> {
    let options: Vec<Vec<Option<usize>>> = start
        .atoms
        .iter()
        .map(|a| std::iter::once(None).chain(program.candidates(a).into_iter().map(Some)).collect())
        .collect();
    let mut out = Vec::new();
    let mut seen: BTreeMap<Name, Option<(Symbol, usize)>> = BTreeMap::new();
    let mut current = Vec::with_capacity(start.len());
    search(start, program, &options, admit, &mut current, &mut seen, &mut out, max)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn search(
    start: &Goal,
    program: &Program,
    options: &[Vec<Option<usize>>],
    admit: &SelectionAdmit<'_>,
    current: &mut Vec<Option<usize>>,
    seen: &mut BTreeMap<Name, Option<(Symbol, usize)>>,
    out: &mut Vec<Vec<Option<usize>>>,
    max: usize,
) -> Result<(), BigStepError> {
    let i = current.len();
    if i == start.len() {
        if admit(current, true) {
            if out.len() >= max {
                return Err(BigStepError::TooMany(max));
            }
            out.push(current.clone());
        }
        return Ok(());
    }
    for choice in &options[i] {
        let acts: Vec<Option<(Symbol, usize)>> = match choice {
            Some(c) => program.clauses[*c].head.args.iter().map(head_action).collect(),
            None => vec![None; start.atoms[i].args.len()],
        };
        let mut added: Vec<Name> = Vec::new();
        let mut ok = true;
        for (t, act) in start.atoms[i].args.iter().zip(acts) {
            let x = t.as_var().expect("goal-graph").clone();
            match seen.get(&x) {
                Some(prev) if *prev != act => {
                    ok = false;
                    break;
                }
                Some(_) => {}
                None => {
                    seen.insert(x.clone(), act);
                    added.push(x);
                }
            }
        }
        current.push(*choice);
        if ok && admit(current, false) {
            search(start, program, options, admit, current, seen, out, max)?;
        }
        current.pop();
        for x in added {
            seen.remove(&x);
        }
    }
    Ok(())
}

/// Variables of `start` bound to function terms.
pub fn acting_vars(b: &BigStep) -> BTreeSet<Name> {
    b.theta.iter().filter(|(_, t)| !t.is_function_free()).map(|(x, _)| x.clone()).collect()
}
