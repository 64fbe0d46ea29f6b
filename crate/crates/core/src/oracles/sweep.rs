use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::procgen::{gen_process, SweepConfig};
use crate::fusion::{normalize, parse_agent_raw, reductions, Agent};
use crate::fusion2hshr::{
    graphs_equal_up_to_renaming, interleaving_admit, normalize_graph, translate_process, translate_with_productions,
    ProductionOptions,
};
use crate::hshr::{
    enumerate_transitions, transitions_equal_fixing_source, Choice, EnumOptions, Judgement, Production,
    ProductionSource,
};
use crate::hshr2slp::{
    choices_for, lift, matches, selection_for, translate_judgement, translate_productions, ClauseOptions,
};
use crate::slp::{big_steps_with, BigStepOptions};
use crate::term::Symbol;

/// Why one process failed the sweep, with everything needed to replay it.
#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub relation: String,
    pub detail: String,
    pub trace: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceVerdict {
    pub index: usize,
    pub process: String,
    pub reductions: usize,
    pub transitions: usize,
    pub big_steps: usize,
    pub ok: bool,
    pub counterexample: Option<Counterexample>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub instances: usize,
    pub reductions: usize,
    pub transitions: usize,
    pub big_steps: usize,
    pub counterexamples: usize,
    pub verdicts: Vec<InstanceVerdict>,
}

/// Productions for every edge label of `g`, in label order.
pub fn productions_for_graph(g: &Judgement, src: &(impl ProductionSource + ?Sized)) -> Vec<Arc<Production>> {
    let labels: BTreeSet<(Symbol, usize)> = g.edges.iter().map(|e| (e.label.clone(), e.att.len())).collect();
    labels.iter().flat_map(|(l, k)| src.productions_for(l, *k)).collect()
}

struct Checker {
    trace: Vec<String>,
}

impl Checker {
    fn fail(&self, relation: &str, detail: String) -> Counterexample {
        Counterexample { relation: relation.into(), detail, trace: self.trace.clone() }
    }
}

/// Relates the three semantics of one closed process: reductions against
/// interleaving-filtered transitions by normalized targets, and those
/// transitions against filtered big-steps of the translated program in both
/// directions.
pub fn check_process(index: usize, a: &Agent) -> InstanceVerdict {
    let mut v = InstanceVerdict {
        index,
        process: a.to_string(),
        reductions: 0,
        transitions: 0,
        big_steps: 0,
        ok: false,
        counterexample: None,
    };
    match run_checks(a, &mut v) {
        Ok(()) => v.ok = true,
        Err(c) => v.counterexample = Some(c),
    }
    v
}

fn run_checks(a: &Agent, v: &mut InstanceVerdict) -> Result<(), Counterexample> {
    let mut ck = Checker { trace: vec![format!("process {a}")] };
    match parse_agent_raw(&a.to_string()) {
        Ok(b) if b == *a => {}
        Ok(b) => return Err(ck.fail("round trip", format!("printed process parses as {b}"))),
        Err(e) => return Err(ck.fail("round trip", e.to_string())),
    }
    let nf = normalize(a).map_err(|e| ck.fail("normalize", e.to_string()))?;
    ck.trace.push(format!("normal form {nf}"));
    let rs = reductions(&nf);
    v.reductions = rs.len();
    let mut reducts = Vec::new();
    for r in &rs {
        ck.trace.push(format!("reduct {}", r.result));
        let g = translate_process(&r.result, None, None).map_err(|e| ck.fail("translate reduct", e.to_string()))?;
        reducts.push(normalize_graph(&g).map_err(|e| ck.fail("normalize reduct", e.to_string()))?);
    }

    let (g, src) =
        translate_with_productions(a, ProductionOptions::default()).map_err(|e| ck.fail("translate", e.to_string()))?;
    ck.trace.push(format!("graph {g}"));
    let en = enumerate_transitions(&g, &src, &interleaving_admit, EnumOptions::default());
    if en.incomplete {
        return Err(ck.fail("enumeration", "transition enumeration hit its bound".into()));
    }
    v.transitions = en.transitions.len();
    let mut targets = Vec::new();
    for t in &en.transitions {
        ck.trace.push(format!("transition {t}"));
        targets.push(normalize_graph(&t.target).map_err(|e| ck.fail("normalize target", e.to_string()))?);
    }
    for (r, rg) in rs.iter().zip(&reducts) {
        if !targets.iter().any(|t| graphs_equal_up_to_renaming(t, rg)) {
            return Err(ck.fail("reduction without transition", format!("{} translates to {rg}", r.result)));
        }
    }
    for (t, tg) in en.transitions.iter().zip(&targets) {
        if !reducts.iter().any(|r| graphs_equal_up_to_renaming(r, tg)) {
            return Err(ck.fail("transition without reduction", format!("{t} normalizes to {tg}")));
        }
    }

    let prods = productions_for_graph(&g, &src);
    let program = translate_productions(&prods, ClauseOptions::default())
        .map_err(|e| ck.fail("translate productions", e.to_string()))?;
    let start = translate_judgement(&g);
    let admit = |sel: &[Option<usize>], complete: bool| {
        let ch = choices_for(sel, &prods);
        let partial: Vec<Option<&Choice>> = ch.iter().map(Some).collect();
        interleaving_admit(&partial, complete)
    };
    let bs = big_steps_with(&start, &program, None, &admit, BigStepOptions::default())
        .map_err(|e| ck.fail("big-steps", e.to_string()))?;
    v.big_steps = bs.len();
    for b in &bs {
        ck.trace.push(format!("big-step {} ending in {}", b.theta, b.end));
    }
    for t in &en.transitions {
        let sel =
            selection_for(t, &prods).ok_or_else(|| ck.fail("provenance", format!("{t} uses unknown productions")))?;
        let Some(b) = bs.iter().find(|b| b.selection == sel) else {
            return Err(ck.fail("transition without big-step", format!("{t} with selection {sel:?}")));
        };
        if matches(t, &start, &b.theta, &b.end).is_none() {
            return Err(
                ck.fail("transition without big-step", format!("{t} is not matched by {} / {}", b.theta, b.end))
            );
        }
    }
    for b in &bs {
        let t = lift(b, &g, &prods).map_err(|e| ck.fail("big-step without transition", e))?;
        if !en.transitions.iter().any(|u| transitions_equal_fixing_source(u, &t)) {
            return Err(ck.fail("big-step without transition", format!("lifted {t} is not enumerated")));
        }
    }
    Ok(())
}

/// Runs [`check_process`] on `count` generated processes in parallel. The
/// report lists verdicts in generation order.
pub fn theorem_sweep(cfg: &SweepConfig, count: usize) -> SweepReport {
    let verdicts: Vec<InstanceVerdict> =
        (0..count).into_par_iter().map(|i| check_process(i, &gen_process(cfg, i as u64))).collect();
    SweepReport {
        config: *cfg,
        instances: count,
        reductions: verdicts.iter().map(|v| v.reductions).sum(),
        transitions: verdicts.iter().map(|v| v.transitions).sum(),
        big_steps: verdicts.iter().map(|v| v.big_steps).sum(),
        counterexamples: verdicts.iter().filter(|v| !v.ok).count(),
        verdicts,
    }
}
