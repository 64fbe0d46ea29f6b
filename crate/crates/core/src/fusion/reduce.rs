use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::alpha::alpha_equal;
use super::ast::{Agent, Prefix};
use super::normal::{normalize, substitutive_effect, NormalForm};
use crate::name::{FreshGen, Name};

/// Which summands fired. Positions are (component, summand) in the source
/// normal form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ReductionLabel {
    Comm { input: (usize, usize), output: (usize, usize) },
    Fusion { at: (usize, usize) },
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub label: ReductionLabel,
    /// The substitutive effect that was applied.
    pub effect: BTreeMap<Name, Name>,
    pub result: NormalForm,
}

/// All one-step reductions, deduplicated up to structural congruence.
///
/// Each class of fused names is represented by its free name when it has
/// one and by its least restricted name otherwise.
pub fn reductions(nf: &NormalForm) -> Vec<Reduction> {
    let restricted: BTreeSet<Name> = nf.restricted.iter().cloned().collect();
    let mut out: Vec<Reduction> = Vec::new();
    let branches = |i: usize| -> &[(Prefix, Agent)] {
        match &nf.sequentials[i] {
            Agent::Sum(bs) => bs,
            _ => &[],
        }
    };
    for i in 0..nf.sequentials.len() {
        for (bi, (p, cont)) in branches(i).iter().enumerate() {
            match p {
                Prefix::Fusion(pairs) => {
                    let Ok(effect) = substitutive_effect(pairs, Some(&restricted), &BTreeSet::new()) else { continue };
                    let mut parts = others(nf, &[i]);
                    parts.push(cont.clone());
                    push_unique(&mut out, ReductionLabel::Fusion { at: (i, bi) }, effect, nf, parts);
                }
                Prefix::Input { chan, args } => {
                    for j in 0..nf.sequentials.len() {
                        if j == i {
                            continue;
                        }
                        for (bj, (q, cont2)) in branches(j).iter().enumerate() {
                            let Prefix::Output { chan: c2, args: ys } = q else { continue };
                            if c2 != chan || ys.len() != args.len() {
                                continue;
                            }
                            let pairs: Vec<(Name, Name)> = args.iter().cloned().zip(ys.iter().cloned()).collect();
                            let Ok(effect) = substitutive_effect(&pairs, Some(&restricted), &BTreeSet::new()) else {
                                continue;
                            };
                            let mut parts = others(nf, &[i, j]);
                            parts.push(cont.clone());
                            parts.push(cont2.clone());
                            let label = ReductionLabel::Comm { input: (i, bi), output: (j, bj) };
                            push_unique(&mut out, label, effect, nf, parts);
                        }
                    }
                }
                Prefix::Output { .. } => {}
            }
        }
    }
    out
}

fn others(nf: &NormalForm, skip: &[usize]) -> Vec<Agent> {
    nf.sequentials.iter().enumerate().filter(|(k, _)| !skip.contains(k)).map(|(_, s)| s.clone()).collect()
}

fn push_unique(
    out: &mut Vec<Reduction>,
    label: ReductionLabel,
    effect: BTreeMap<Name, Name>,
    nf: &NormalForm,
    parts: Vec<Agent>,
) {
    let mut gen = FreshGen::avoiding(nf.all_names().iter().chain(effect.values()));
    let body = Agent::par_all(parts).subst(&effect, &mut gen);
    let keep: Vec<Name> = nf.restricted.iter().filter(|r| !effect.contains_key(*r)).cloned().collect();
    let result = normalize(&Agent::scope_all(&keep, body)).expect("closed under agent variables");
    let ra = result.to_agent();
    if out.iter().any(|r| alpha_equal(&r.result.to_agent(), &ra)) {
        return;
    }
    out.push(Reduction { label, effect, result });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::parse::parse_agent;

    fn reduce(src: &str) -> Vec<Reduction> {
        reductions(&normalize(&parse_agent(src).unwrap()).unwrap())
    }

    #[test]
    fn communication_fuses_arguments() {
        let rs = reduce("(u x y z w)(Q(x, y, z) | 'u<x y>.R(u, x) | u<z w>.S(z, w))");
        assert_eq!(rs.len(), 1);
        let expected = parse_agent("(u x y)(Q(x, y, x) | R(u, x) | S(x, y))").unwrap();
        assert!(alpha_equal(&rs[0].result.to_agent(), &expected));
    }

    #[test]
    fn free_names_cannot_be_fused() {
        assert!(reduce("'u<a>.0 | u<b>.0").is_empty());
        assert_eq!(reduce("(u)('u<a>.0 | u<b>.0)").len(), 0);
        assert_eq!(reduce("(u b)('u<a>.0 | u<b>.0)").len(), 1);
    }

    #[test]
    fn free_name_is_representative() {
        let rs = reduce("(u b)('u<a>.P(b) | u<b>.0)");
        assert_eq!(rs.len(), 1);
        assert!(alpha_equal(&rs[0].result.to_agent(), &parse_agent("P(a)").unwrap()));
    }

    #[test]
    fn fusion_prefix() {
        let rs = reduce("(x){x=y}.'x<z>.0");
        assert_eq!(rs.len(), 1);
        assert!(alpha_equal(&rs[0].result.to_agent(), &parse_agent("'y<z>.0").unwrap()));
        assert!(reduce("{x=y}.0").is_empty());
    }

    #[test]
    fn arity_mismatch_blocks() {
        assert!(reduce("(u)('u<a>.0 | u<>.0)").is_empty());
    }

    #[test]
    fn recursion_unfolds_once() {
        let rs = reduce("(u z)('u<z>.0 | rec X.(x)u<x>.('u<x>.0 | X))");
        assert_eq!(rs.len(), 1);
        let expected = parse_agent("(u z)('u<z>.0 | rec X.(x)u<x>.('u<x>.0 | X))").unwrap();
        assert!(alpha_equal(&rs[0].result.to_agent(), &expected));
    }
}
