use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use super::translate::{connector, connector_rank, CLOSE};
use crate::hshr::{find_renaming, Edge, HGraph, Judgement};
use crate::name::Name;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AmoeboidClass {
    /// A single connector whose tentacles are all external.
    Simple(usize),
    Structured,
    /// No external node: rings left behind by synchronizations, or names
    /// nobody uses any more.
    Pseudo,
    NotAmoeboid,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AmoeboidReport {
    pub external: BTreeSet<Name>,
    pub internal: BTreeSet<Name>,
    #[serde(rename = "class")]
    pub classification: AmoeboidClass,
    #[serde(rename = "parity")]
    pub parity_ok: bool,
}

pub fn is_amoeboid_edge(e: &Edge) -> bool {
    &*e.label == CLOSE || connector_rank(&e.label).is_some()
}

/// Steps allowed to the exhaustive path search before falling back to edge
/// two-colouring.
const PATH_BUDGET: usize = 200_000;

/// Classifies a connected graph of connectors and closing edges. With
/// `claimed_external`, the computed external set must match it.
pub fn classify_amoeboid(sub: &Judgement, claimed_external: Option<&BTreeSet<Name>>) -> AmoeboidReport {
    let degrees = sub.degrees();
    let external: BTreeSet<Name> = degrees.iter().filter(|(_, d)| **d == 1).map(|(n, _)| n.clone()).collect();
    let internal: BTreeSet<Name> = degrees.iter().filter(|(_, d)| **d == 2).map(|(n, _)| n.clone()).collect();
    let report = |classification, parity_ok| AmoeboidReport {
        external: external.clone(),
        internal: internal.clone(),
        classification,
        parity_ok,
    };
    let shape_ok = sub.edges.iter().all(is_amoeboid_edge)
        && degrees.values().all(|d| *d == 1 || *d == 2)
        && sub.edges.iter().all(|e| e.att.iter().collect::<BTreeSet<_>>().len() == e.att.len())
        && connected(sub)
        && claimed_external.is_none_or(|c| *c == external);
    if !shape_ok {
        return report(AmoeboidClass::NotAmoeboid, false);
    }
    if external.is_empty() {
        return report(AmoeboidClass::Pseudo, true);
    }
    if sub.edges.len() == 1 && internal.is_empty() && &*sub.edges[0].label != CLOSE {
        return report(AmoeboidClass::Simple(external.len()), true);
    }
    let parity_ok = odd_paths(sub, &external);
    if parity_ok {
        report(AmoeboidClass::Structured, true)
    } else {
        report(AmoeboidClass::NotAmoeboid, false)
    }
}

fn connected(g: &Judgement) -> bool {
    let Some(start) = g.nodes.iter().next() else { return true };
    let mut seen: BTreeSet<&Name> = [start].into();
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for e in g.edges.iter().filter(|e| e.att.contains(x)) {
            for y in &e.att {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
    }
    seen.len() == g.nodes.len()
}

/// Every simple path between two distinct external nodes has an odd number
/// of edges.
fn odd_paths(g: &Judgement, external: &BTreeSet<Name>) -> bool {
    let index: BTreeMap<&Name, usize> = g.nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let incident: Vec<Vec<usize>> =
        g.nodes.iter().map(|n| (0..g.edges.len()).filter(|&e| g.edges[e].att.contains(n)).collect()).collect();
    let mut steps = 0usize;
    for s in external {
        let si = index[s];
        let mut visited = vec![false; g.nodes.len()];
        let mut used = vec![false; g.edges.len()];
        visited[si] = true;
        match walk(g, &index, &incident, external, si, 0, (&mut visited, &mut used), &mut steps) {
            Some(true) => {}
            Some(false) => return false,
            None => return two_colourable(g, external),
        }
    }
    true
}

#[allow(clippy::too_many_arguments)]
fn walk(
    g: &Judgement,
    index: &BTreeMap<&Name, usize>,
    incident: &[Vec<usize>],
    external: &BTreeSet<Name>,
    at: usize,
    len: usize,
    (visited, used): (&mut Vec<bool>, &mut Vec<bool>),
    steps: &mut usize,
) -> Option<bool> {
    *steps += 1;
    if *steps > PATH_BUDGET {
        return None;
    }
    for &e in &incident[at] {
        if used[e] {
            continue;
        }
        used[e] = true;
        for n in &g.edges[e].att {
            let j = index[n];
            if visited[j] {
                continue;
            }
            if external.contains(n) {
                if (len + 1).is_multiple_of(2) {
                    used[e] = false;
                    return Some(false);
                }
                continue;
            }
            visited[j] = true;
            let r = walk(g, index, incident, external, j, len + 1, (&mut *visited, &mut *used), steps);
            visited[j] = false;
            if r != Some(true) {
                return r;
            }
        }
        used[e] = false;
    }
    Some(true)
}

/// Edges sharing an internal node get different colours and every edge on
/// an external node gets the same colour.
fn two_colourable(g: &Judgement, external: &BTreeSet<Name>) -> bool {
    let mut colour: Vec<Option<bool>> = vec![None; g.edges.len()];
    for (i, e) in g.edges.iter().enumerate() {
        if e.att.iter().any(|n| external.contains(n)) {
            colour[i] = Some(false);
        }
    }
    let mut stack: Vec<usize> = (0..g.edges.len()).filter(|&i| colour[i].is_some()).collect();
    while let Some(i) = stack.pop() {
        let c = colour[i].expect("coloured");
        for n in g.edges[i].att.iter().filter(|n| !external.contains(*n)) {
            for (j, f) in g.edges.iter().enumerate() {
                if j == i || !f.att.contains(n) {
                    continue;
                }
                match colour[j] {
                    Some(d) if d == c => return false,
                    Some(_) => {}
                    None => {
                        colour[j] = Some(!c);
                        stack.push(j);
                    }
                }
            }
        }
    }
    true
}

/// Connected components of the connector and closing edges of `g`.
pub fn amoeboid_components(g: &Judgement) -> Vec<Judgement> {
    let edges: Vec<&Edge> = g.edges.iter().filter(|e| is_amoeboid_edge(e)).collect();
    let mut parent: Vec<usize> = (0..edges.len()).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        if p[i] != i {
            let r = find(p, p[i]);
            p[i] = r;
        }
        p[i]
    }
    let mut owner: BTreeMap<&Name, usize> = BTreeMap::new();
    for (i, e) in edges.iter().enumerate() {
        for n in &e.att {
            if let Some(&j) = owner.get(n) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            } else {
                owner.insert(n, i);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<Edge>> = BTreeMap::new();
    for (i, e) in edges.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push((*e).clone());
    }
    groups.into_values().map(|es| Judgement::with_attached([], es)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("connector component on {nodes} is not an amoeboid")]
pub struct NotAmoeboid {
    pub nodes: String,
    pub report: AmoeboidReport,
}

/// Replaces each amoeboid by one connector over its external nodes in name
/// order, drops components without external nodes, and drops isolated
/// nodes. Process edges are kept.
pub fn normalize_graph(g: &Judgement) -> Result<Judgement, NotAmoeboid> {
    let mut edges: Vec<Edge> = g.edges.iter().filter(|e| !is_amoeboid_edge(e)).cloned().collect();
    let on_process: BTreeSet<Name> = edges.iter().flat_map(|e| e.att.iter().cloned()).collect();
    for comp in amoeboid_components(g) {
        let mut report = classify_amoeboid(&comp, None);
        if report.internal.iter().any(|n| on_process.contains(n)) {
            report.classification = AmoeboidClass::NotAmoeboid;
        }
        match report.classification {
            AmoeboidClass::NotAmoeboid => {
                let nodes: Vec<String> = comp.nodes.iter().map(|n| n.to_string()).collect();
                return Err(NotAmoeboid { nodes: nodes.join(", "), report });
            }
            AmoeboidClass::Pseudo => {}
            _ => {
                let att: Vec<Name> = report.external.iter().cloned().collect();
                edges.push(Edge::new(&connector(att.len()), att));
            }
        }
    }
    Ok(Judgement::with_attached([], edges))
}

fn as_hgraph(g: &Judgement) -> HGraph {
    let mut h = HGraph::default();
    h.add_nodes(g.nodes.iter());
    for e in &g.edges {
        h.add_edge(e.label.to_string(), e.att.clone());
    }
    h
}

fn symmetric(label: &str) -> bool {
    connector_rank(label).is_some()
}

/// Equality up to renaming, with connector tentacles unordered.
pub fn graphs_equal_up_to_renaming(a: &Judgement, b: &Judgement) -> bool {
    find_renaming(&as_hgraph(a), &as_hgraph(b), &BTreeMap::new(), &symmetric).is_some()
}

/// Normalizes both graphs and compares them up to renaming.
pub fn normalized_equal(a: &Judgement, b: &Judgement) -> Result<bool, NotAmoeboid> {
    Ok(graphs_equal_up_to_renaming(&normalize_graph(a)?, &normalize_graph(b)?))
}
