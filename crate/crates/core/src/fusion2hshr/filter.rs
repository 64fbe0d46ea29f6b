use std::collections::BTreeMap;

use super::translate::{is_process_label, translate_agent, TranslateError};
use crate::hshr::{
    enumerate_transitions, Act, Choice, EnumOptions, Enumeration, Judgement, Production, ProductionSource, Transition,
};

/// How a process production moves: an input or output of some arity, or a
/// fusion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Move {
    In(usize),
    Out(usize),
    Fusion,
}

fn process_move(p: &Production) -> Option<Move> {
    if !is_process_label(&p.lhs.label) {
        return None;
    }
    for a in p.label.lambda.values() {
        if let Act::Do(s, ys) = a {
            if s.starts_with("in") {
                return Some(Move::In(ys.len()));
            }
            if s.starts_with("out") {
                return Some(Move::Out(ys.len()));
            }
        }
    }
    Some(Move::Fusion)
}

fn moves<'a>(choices: impl Iterator<Item = &'a Choice>) -> Vec<Move> {
    choices.filter_map(|c| c.production().and_then(|p| process_move(p))).collect()
}

fn acceptable(ms: &[Move], complete: bool) -> bool {
    match ms {
        [] => !complete,
        [Move::Fusion] => true,
        [Move::In(_)] | [Move::Out(_)] => !complete,
        [Move::In(n), Move::Out(m)] | [Move::Out(m), Move::In(n)] => n == m,
        _ => false,
    }
}

/// Exactly two process productions with complementary prefixes, or exactly
/// one fusion production; auxiliary and idle choices are unrestricted.
pub fn interleaving_filter(t: &Transition) -> bool {
    match &t.provenance {
        Some(choices) => acceptable(&moves(choices.iter()), true),
        None => false,
    }
}

/// Pruning hook enforcing [`interleaving_filter`] during enumeration.
pub fn interleaving_admit(partial: &[Option<&Choice>], complete: bool) -> bool {
    acceptable(&moves(partial.iter().flatten().copied()), complete)
}

/// Transitions of `g` that pass the interleaving filter.
pub fn filtered_transitions(g: &Judgement, src: &(impl ProductionSource + ?Sized), opts: EnumOptions) -> Enumeration {
    enumerate_transitions(g, src, &interleaving_admit, opts)
}

/// Counts process productions per kind in a transition, for reports.
pub fn provenance_summary(t: &Transition) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for c in t.provenance.iter().flatten() {
        let key = match c {
            Choice::Idle => "idle".to_string(),
            Choice::Use(p) => p.name.clone().unwrap_or_else(|| "unnamed".into()),
        };
        *out.entry(key).or_insert(0) += 1;
    }
    out
}

/// Translation image of an agent together with the productions it needs.
pub fn translate_with_productions(
    a: &crate::fusion::Agent,
    opts: super::ProductionOptions,
) -> Result<(Judgement, super::FusionProductions), TranslateError> {
    Ok((translate_agent(a)?, super::FusionProductions::for_agent(a, opts)))
}
