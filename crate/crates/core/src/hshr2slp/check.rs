use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::translate::{associated_substitution, translate_judgement, translate_productions, ClauseOptions};
use crate::hshr::{derive_transition, Choice, DeriveOptions, Judgement, Production, Transition};
use crate::name::Name;
use crate::slp::{big_step_for, big_steps, observably_equal, BigStep, BigStepOptions, Goal, Program};
use crate::term::Substitution;

/// A big-step matched with a transition.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub selection: Vec<Option<usize>>,
    pub theta: Substitution,
    pub end: Goal,
    pub rho: BTreeMap<Name, Name>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CorrespondenceReport {
    /// The transition has a matching big-step.
    pub correct: bool,
    /// Every big-step from the translated source lifts to a transition.
    pub complete: bool,
    pub big_steps: usize,
    pub witness: Option<Witness>,
    pub counterexample: Option<String>,
}

impl CorrespondenceReport {
    pub fn passed(&self) -> bool {
        self.correct && self.complete
    }
}

/// Clause indices for the rules a transition used, matching productions by
/// value.
pub fn selection_for(t: &Transition, prods: &[Arc<Production>]) -> Option<Vec<Option<usize>>> {
    t.provenance
        .as_ref()?
        .iter()
        .map(|c| match c {
            Choice::Idle => Some(None),
            Choice::Use(p) => prods.iter().position(|q| Arc::ptr_eq(p, q) || **q == **p).map(Some),
        })
        .collect()
}

pub fn choices_for(selection: &[Option<usize>], prods: &[Arc<Production>]) -> Vec<Choice> {
    selection.iter().map(|s| s.map_or(Choice::Idle, |k| Choice::Use(prods[k].clone()))).collect()
}

/// Whether a big-step result is the image of `t`: its substitution is
/// associated to `t` and its end goal is the translated target, both under
/// the canonical renaming.
pub fn matches(t: &Transition, start: &Goal, theta: &Substitution, end: &Goal) -> Option<Witness> {
    let assoc = associated_substitution(t, None).ok()?;
    let keep = start.vars();
    let rho = &assoc.rho;
    let target = translate_judgement(&t.target.rename(&|n: &Name| rho.get(n).cloned().unwrap_or_else(|| n.clone())));
    let expected = assoc.theta.restrict(&keep);
    observably_equal(&keep, (theta, end), (&expected, &target)).then(|| Witness {
        selection: Vec::new(),
        theta: expected,
        end: target,
        rho: assoc.rho.clone(),
    })
}

/// The transition using the productions a big-step used, provided the
/// big-step is its image.
pub fn lift(b: &BigStep, source: &Judgement, prods: &[Arc<Production>]) -> Result<Transition, String> {
    let choices = choices_for(&b.selection, prods);
    let t = derive_transition(source, &choices, &BTreeMap::new(), DeriveOptions::default())
        .map_err(|e| format!("big-step with selection {:?} has no transition: {e}", b.selection))?;
    match matches(&t, &b.start, &b.theta, &b.end) {
        Some(_) => Ok(t),
        None => Err(format!("big-step {} / {} does not match transition {t}", b.theta, b.end)),
    }
}

/// Checks both directions for one transition: it has a big-step from the
/// translated source whose substitution is associated to it and whose end
/// is the translated target up to renaming, and every big-step from the
/// translated source lifts to a derivable transition.
pub fn check_correspondence(t: &Transition, prods: &[Arc<Production>]) -> CorrespondenceReport {
    let mut report = CorrespondenceReport::default();
    let program: Program = match translate_productions(prods, ClauseOptions::default()) {
        Ok(p) => p,
        Err(e) => {
            report.counterexample = Some(e.to_string());
            return report;
        }
    };
    let start = translate_judgement(&t.source);
    match selection_for(t, prods) {
        None => report.counterexample = Some("transition does not record its productions".into()),
        Some(sel) => match big_step_for(&start, &program, &sel) {
            Ok(Some(b)) => match matches(t, &start, &b.theta, &b.end) {
                Some(mut w) => {
                    w.selection = sel;
                    report.correct = true;
                    report.witness = Some(w);
                }
                None => {
                    report.counterexample = Some(format!("big-step {} / {} is not the image of {t}", b.theta, b.end));
                }
            },
            Ok(None) => report.counterexample = Some(format!("no big-step for selection {sel:?}")),
            Err(e) => report.counterexample = Some(e.to_string()),
        },
    }
    match big_steps(&start, &program, None, BigStepOptions::default()) {
        Ok(all) => {
            report.big_steps = all.len();
            report.complete = true;
            for b in &all {
                if let Err(e) = lift(b, &t.source, prods) {
                    report.complete = false;
                    report.counterexample.get_or_insert(e);
                    break;
                }
            }
        }
        Err(e) => {
            report.counterexample.get_or_insert(e.to_string());
        }
    }
    report
}
