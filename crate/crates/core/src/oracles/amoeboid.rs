use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::fusion2hshr::{graphs_equal_up_to_renaming, FusionProductions, ProductionOptions};
use crate::hshr::{admit_all, enumerate_transitions, Act, Edge, EnumOptions, Judgement, Transition};
use crate::name::Name;

/// Largest vector length exposed by the auxiliary productions under test.
pub const MAX_N: usize = 2;

fn is_connected(nodes: &BTreeSet<Name>, edges: &[Edge]) -> bool {
    let Some(first) = nodes.iter().next() else { return true };
    let mut seen: BTreeSet<Name> = [first.clone()].into();
    let mut frontier = vec![first.clone()];
    while let Some(x) = frontier.pop() {
        for e in edges.iter().filter(|e| e.att.contains(&x)) {
            for y in &e.att {
                if seen.insert(y.clone()) {
                    frontier.push(y.clone());
                }
            }
        }
    }
    seen.len() == nodes.len()
}

/// Lengths of all simple paths, counted in edges, from `from` to other
/// members of `ends`, never passing through a member of `ends`.
fn path_lengths(edges: &[Edge], from: &Name, ends: &BTreeSet<Name>) -> Vec<usize> {
    fn go(
        edges: &[Edge],
        at: &Name,
        ends: &BTreeSet<Name>,
        used: &mut Vec<bool>,
        seen: &mut BTreeSet<Name>,
        len: usize,
        out: &mut Vec<usize>,
    ) {
        for (i, e) in edges.iter().enumerate() {
            if used[i] || !e.att.contains(at) {
                continue;
            }
            used[i] = true;
            for y in &e.att {
                if seen.contains(y) {
                    continue;
                }
                if ends.contains(y) {
                    out.push(len + 1);
                    continue;
                }
                seen.insert(y.clone());
                go(edges, y, ends, used, seen, len + 1, out);
                seen.remove(y);
            }
            used[i] = false;
        }
    }
    let mut out = Vec::new();
    let mut seen: BTreeSet<Name> = [from.clone()].into();
    go(edges, from, ends, &mut vec![false; edges.len()], &mut seen, 0, &mut out);
    out
}

/// Connected, degree one on external nodes and two on internal ones, and
/// every path between external nodes has odd length.
fn structured(nodes: &BTreeSet<Name>, edges: &[Edge]) -> bool {
    let mut deg: BTreeMap<&Name, usize> = BTreeMap::new();
    for e in edges {
        for x in &e.att {
            *deg.entry(x).or_default() += 1;
        }
    }
    if !deg.values().all(|d| *d == 1 || *d == 2) || !is_connected(nodes, edges) {
        return false;
    }
    let ext: BTreeSet<Name> = deg.iter().filter(|(_, d)| **d == 1).map(|(x, _)| (*x).clone()).collect();
    !ext.is_empty() && ext.iter().all(|s| path_lengths(edges, s, &ext).iter().all(|l| l % 2 == 1))
}

/// Every structured amoeboid built from at most `max_connectors` binary and
/// ternary connectors, one per class of isomorphic graphs. External nodes
/// are named `s1, s2, ...` and internal ones `i1, i2, ...`.
pub fn structured_amoeboids(max_connectors: usize) -> Vec<Judgement> {
    let mut found: Vec<Judgement> = Vec::new();
    for total in 1..=max_connectors {
        for k3 in 0..=total {
            let ranks: Vec<usize> = std::iter::repeat_n(2, total - k3).chain(std::iter::repeat_n(3, k3)).collect();
            let tentacles: Vec<(usize, usize)> =
                ranks.iter().enumerate().flat_map(|(e, &r)| (0..r).map(move |p| (e, p))).collect();
            let mut assign: Vec<Option<Name>> = vec![None; tentacles.len()];
            let mut out = Vec::new();
            pairings(&tentacles, &mut assign, 0, 0, &mut out);
            for names in out {
                let mut edges: Vec<Edge> =
                    ranks.iter().map(|&r| Edge::new(&format!("m{r}"), vec![Name::user("_"); r])).collect();
                for (t, n) in tentacles.iter().zip(&names) {
                    edges[t.0].att[t.1] = n.clone();
                }
                let nodes: BTreeSet<Name> = names.into_iter().collect();
                if !structured(&nodes, &edges) {
                    continue;
                }
                let g = Judgement::with_attached(nodes, edges);
                if !found.iter().any(|h| {
                    h.edges.len() == g.edges.len()
                        && h.nodes.len() == g.nodes.len()
                        && graphs_equal_up_to_renaming(h, &g)
                }) {
                    found.push(g);
                }
            }
        }
    }
    found
}

/// Assigns every tentacle either its own external node or an internal node
/// shared with exactly one later tentacle of another connector.
fn pairings(
    tentacles: &[(usize, usize)],
    assign: &mut Vec<Option<Name>>,
    ext: usize,
    int: usize,
    out: &mut Vec<Vec<Name>>,
) {
    let Some(i) = assign.iter().position(Option::is_none) else {
        out.push(assign.iter().map(|n| n.clone().expect("assigned")).collect());
        return;
    };
    assign[i] = Some(Name::user(&format!("s{}", ext + 1)));
    pairings(tentacles, assign, ext + 1, int, out);
    for j in i + 1..tentacles.len() {
        if assign[j].is_some() || tentacles[j].0 == tentacles[i].0 {
            continue;
        }
        let node = Name::user(&format!("i{}", int + 1));
        assign[i] = Some(node.clone());
        assign[j] = Some(node);
        pairings(tentacles, assign, ext, int + 1, out);
        assign[j] = None;
    }
    assign[i] = None;
}

#[derive(Clone, Debug, Serialize)]
pub struct AmoeboidVerdict {
    pub amoeboid: String,
    pub external: usize,
    /// Transitions with visible activity on at most two external nodes.
    pub restricted: usize,
    pub deviations: Vec<String>,
    /// `(x1, x2, n)` with no transition exposing `in_n` on `x1` and `out_n`
    /// on `x2`.
    pub missing: Vec<(Name, Name, usize)>,
}

impl AmoeboidVerdict {
    pub fn ok(&self) -> bool {
        self.deviations.is_empty() && self.missing.is_empty()
    }
}

/// Checks one non-idle transition against the expected shape: `in_n` and
/// `out_n` on two external nodes with vectors of distinct fresh names, no
/// fusion, the amoeboid kept, and the new connectors forming one odd
/// `m2`-chain per vector position plus rings on fresh nodes.
fn expected_shape(m: &Judgement, ext: &BTreeSet<Name>, t: &Transition) -> Result<(Name, Name, usize), String> {
    let active: Vec<(&Name, &Act)> = t.label.lambda.iter().filter(|(x, a)| ext.contains(*x) && !a.is_eps()).collect();
    let [(x1, a1), (x2, a2)] = active.as_slice() else {
        return Err(format!("{} external nodes active", active.len()));
    };
    let (inp, outp, ys_in, ys_out) = match (a1, a2) {
        (Act::Do(s, ys), Act::Do(r, zs)) if s.starts_with("in") && r.starts_with("out") => {
            ((*x1).clone(), (*x2).clone(), ys, zs)
        }
        (Act::Do(s, ys), Act::Do(r, zs)) if s.starts_with("out") && r.starts_with("in") => {
            ((*x2).clone(), (*x1).clone(), zs, ys)
        }
        _ => return Err(format!("actions {a1} and {a2} are not complementary")),
    };
    let n = ys_in.len();
    if ys_out.len() != n
        || t.label.act(&inp) != Act::new(&format!("in{n}"), ys_in.clone())
        || t.label.act(&outp) != Act::new(&format!("out{n}"), ys_out.clone())
    {
        return Err("vector lengths or action names disagree".into());
    }
    if t.label.pi.iter().any(|(k, v)| k != v) {
        return Err("fusion is not the identity".into());
    }
    let ys: Vec<&Name> = ys_in.iter().chain(ys_out.iter()).collect();
    let distinct: BTreeSet<&Name> = ys.iter().copied().collect();
    if distinct.len() != ys.len() || ys.iter().any(|y| m.nodes.contains(*y)) {
        return Err("exposed names are not distinct fresh names".into());
    }

    let mut old: Vec<(String, Vec<Name>)> = m.edges.iter().map(|e| (e.label.to_string(), e.att.clone())).collect();
    let mut extra: Vec<Edge> = Vec::new();
    for e in &t.target.edges {
        let key = (e.label.to_string(), e.att.clone());
        match old.iter().position(|o| *o == key) {
            Some(i) => {
                old.swap_remove(i);
            }
            None => extra.push(e.clone()),
        }
    }
    if !old.is_empty() {
        return Err("the amoeboid is not kept".into());
    }
    if extra.iter().any(|e| &*e.label != "m2") {
        return Err("new edges other than binary connectors".into());
    }
    let mut expected_nodes: BTreeSet<Name> = m.nodes.clone();
    expected_nodes.extend(ys.iter().map(|y| (*y).clone()));
    expected_nodes.extend(extra.iter().flat_map(|e| e.att.iter().cloned()));
    if t.target.nodes != expected_nodes {
        return Err("unexpected target nodes".into());
    }
    if extra.iter().flat_map(|e| &e.att).any(|x| m.nodes.contains(x)) {
        return Err("new connectors touch the amoeboid".into());
    }

    let mut deg: BTreeMap<&Name, usize> = BTreeMap::new();
    for e in &extra {
        for x in &e.att {
            *deg.entry(x).or_default() += 1;
        }
    }
    for (i, (a, b)) in ys_in.iter().zip(ys_out.iter()).enumerate() {
        if deg.get(a) != Some(&1) || deg.get(b) != Some(&1) {
            return Err(format!("position {} is not bridged by a chain", i + 1));
        }
        let ends: BTreeSet<Name> = ys.iter().map(|y| (*y).clone()).collect();
        let lens = path_lengths(&extra, a, &ends);
        if lens.len() != 1 || lens[0].is_multiple_of(2) {
            return Err(format!("position {} is not bridged by one odd chain", i + 1));
        }
        let reached = reach(&extra, a);
        if !reached.contains(b) || reached.iter().filter(|x| distinct.contains(x)).count() != 2 {
            return Err(format!("chain from position {} ends elsewhere", i + 1));
        }
    }
    for (x, d) in &deg {
        if !distinct.contains(x) && *d != 2 {
            return Err(format!("fresh node {x} has degree {d}"));
        }
    }
    Ok((inp, outp, n))
}

fn reach(edges: &[Edge], from: &Name) -> BTreeSet<Name> {
    let mut seen: BTreeSet<Name> = [from.clone()].into();
    let mut frontier = vec![from.clone()];
    while let Some(x) = frontier.pop() {
        for e in edges.iter().filter(|e| e.att.contains(&x)) {
            for y in &e.att {
                if seen.insert(y.clone()) {
                    frontier.push(y.clone());
                }
            }
        }
    }
    seen
}

/// Enumerates all transitions of `m` under the auxiliary productions for
/// vector lengths `0..=MAX_N`, keeps those active on one or two external
/// nodes, and checks each against the expected shape. Every ordered pair of
/// external nodes and every vector length must be realized.
pub fn check_amoeboid(m: &Judgement) -> AmoeboidVerdict {
    let mut deg: BTreeMap<&Name, usize> = BTreeMap::new();
    for e in &m.edges {
        for x in &e.att {
            *deg.entry(x).or_default() += 1;
        }
    }
    let ext: BTreeSet<Name> = deg.iter().filter(|(_, d)| **d == 1).map(|(x, _)| (*x).clone()).collect();
    let src = FusionProductions::new((0..=MAX_N).collect(), ProductionOptions::default());
    let opts = EnumOptions { max_choice_maps: 2_000_000, ..EnumOptions::default() };
    let en = enumerate_transitions(m, &src, &admit_all, opts);
    let mut v = AmoeboidVerdict {
        amoeboid: m.to_string(),
        external: ext.len(),
        restricted: 0,
        deviations: Vec::new(),
        missing: Vec::new(),
    };
    if en.incomplete {
        v.deviations.push("enumeration hit its bound".into());
    }
    let mut realized: BTreeSet<(Name, Name, usize)> = BTreeSet::new();
    for t in &en.transitions {
        let active = t.label.lambda.iter().filter(|(x, a)| ext.contains(*x) && !a.is_eps()).count();
        if active == 0 || active > 2 {
            continue;
        }
        v.restricted += 1;
        match expected_shape(m, &ext, t) {
            Ok(key) => {
                realized.insert(key);
            }
            Err(e) => v.deviations.push(format!("{t}: {e}")),
        }
    }
    for x1 in &ext {
        for x2 in ext.iter().filter(|x| *x != x1) {
            for n in 0..=MAX_N {
                if !realized.contains(&(x1.clone(), x2.clone(), n)) {
                    v.missing.push((x1.clone(), x2.clone(), n));
                }
            }
        }
    }
    v
}

/// Checks every structured amoeboid with at most `max_connectors`
/// connectors, in parallel.
pub fn amoeboid_sweep(max_connectors: usize) -> Vec<AmoeboidVerdict> {
    structured_amoeboids(max_connectors).par_iter().map(check_amoeboid).collect()
}
