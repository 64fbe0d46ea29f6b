//! Renaming search between labelled hypergraphs.
//!
//! Candidate node pairs are narrowed by iterated colour refinement and the
//! remaining choices are explored by backtracking, checking every edge as
//! soon as all of its tentacles are mapped.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::{Hash, Hasher};

use crate::name::Name;

/// A plain hypergraph: nodes and labelled edges. Labels accepted by the
/// `symmetric` predicate have unordered tentacles.
#[derive(Clone, Debug, Default)]
pub struct HGraph {
    pub nodes: Vec<Name>,
    pub edges: Vec<(String, Vec<Name>)>,
}

impl HGraph {
    pub fn add_edge(&mut self, label: impl Into<String>, att: Vec<Name>) {
        self.edges.push((label.into(), att));
    }

    /// Adds nodes of `names` that are not yet present.
    pub fn add_nodes<'a>(&mut self, names: impl IntoIterator<Item = &'a Name>) {
        let mut seen: BTreeSet<Name> = self.nodes.iter().cloned().collect();
        for n in names {
            if seen.insert(n.clone()) {
                self.nodes.push(n.clone());
            }
        }
    }
}

fn h<T: Hash>(t: &T) -> u64 {
    let mut s = DefaultHasher::new();
    t.hash(&mut s);
    s.finish()
}

struct Prepared<'a> {
    g: &'a HGraph,
    index: BTreeMap<Name, usize>,
    /// Edges incident to each node, as (edge, position).
    incident: Vec<Vec<(usize, usize)>>,
}

impl<'a> Prepared<'a> {
    fn new(g: &'a HGraph) -> Prepared<'a> {
        let index: BTreeMap<Name, usize> = g.nodes.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let mut incident = vec![Vec::new(); g.nodes.len()];
        for (e, (_, att)) in g.edges.iter().enumerate() {
            for (p, n) in att.iter().enumerate() {
                incident[index[n]].push((e, p));
            }
        }
        Prepared { g, index, incident }
    }
}

fn refine(p: &Prepared, init: Vec<u64>, symmetric: &dyn Fn(&str) -> bool) -> Vec<u64> {
    let mut colors = init;
    for _ in 0..p.g.nodes.len().clamp(1, 12) {
        let edge_colors: Vec<u64> =
            p.g.edges
                .iter()
                .map(|(l, att)| {
                    let mut cs: Vec<u64> = att.iter().map(|n| colors[p.index[n]]).collect();
                    if symmetric(l) {
                        cs.sort_unstable();
                    }
                    h(&(l, cs))
                })
                .collect();
        let next: Vec<u64> = (0..p.g.nodes.len())
            .map(|i| {
                let mut sig: Vec<(u64, usize)> = p.incident[i]
                    .iter()
                    .map(|&(e, pos)| (edge_colors[e], if symmetric(&p.g.edges[e].0) { 0 } else { pos + 1 }))
                    .collect();
                sig.sort_unstable();
                h(&(colors[i], sig))
            })
            .collect();
        let before = colors.iter().collect::<BTreeSet<_>>().len();
        let after = next.iter().collect::<BTreeSet<_>>().len();
        colors = next;
        if after == before {
            break;
        }
    }
    colors
}

type EdgeKey = (String, Vec<Name>);

fn key(label: &str, att: Vec<Name>, symmetric: &dyn Fn(&str) -> bool) -> EdgeKey {
    let mut att = att;
    if symmetric(label) {
        att.sort();
    }
    (label.to_string(), att)
}

/// Finds a bijection `a -> b` on nodes that maps the edge multiset of `a`
/// onto that of `b` and agrees with `fixed`.
pub fn find_renaming(
    a: &HGraph,
    b: &HGraph,
    fixed: &BTreeMap<Name, Name>,
    symmetric: &dyn Fn(&str) -> bool,
) -> Option<BTreeMap<Name, Name>> {
    if a.nodes.len() != b.nodes.len() || a.edges.len() != b.edges.len() {
        return None;
    }
    let pa = Prepared::new(a);
    let pb = Prepared::new(b);
    let mut pinned_b: HashMap<&Name, u64> = HashMap::new();
    for (x, y) in fixed {
        if !pa.index.contains_key(x) || !pb.index.contains_key(y) {
            return None;
        }
        pinned_b.insert(y, h(&("pin", y)));
    }
    let init_a: Vec<u64> = a.nodes.iter().map(|n| fixed.get(n).map(|y| h(&("pin", y))).unwrap_or(1)).collect();
    let init_b: Vec<u64> = b.nodes.iter().map(|n| pinned_b.get(n).copied().unwrap_or(1)).collect();
    let ca = refine(&pa, init_a, symmetric);
    let cb = refine(&pb, init_b, symmetric);
    let mut ha: BTreeMap<u64, usize> = BTreeMap::new();
    let mut hb: BTreeMap<u64, usize> = BTreeMap::new();
    ca.iter().for_each(|c| *ha.entry(*c).or_insert(0) += 1);
    cb.iter().for_each(|c| *hb.entry(*c).or_insert(0) += 1);
    if ha != hb {
        return None;
    }
    let mut b_count: HashMap<EdgeKey, usize> = HashMap::new();
    for (l, att) in &b.edges {
        *b_count.entry(key(l, att.clone(), symmetric)).or_insert(0) += 1;
    }
    let mut a_labels: Vec<&String> = a.edges.iter().map(|(l, _)| l).collect();
    let mut b_labels: Vec<&String> = b.edges.iter().map(|(l, _)| l).collect();
    a_labels.sort();
    b_labels.sort();
    if a_labels != b_labels {
        return None;
    }
    // Visit nodes from the smallest colour classes, then by adjacency.
    let mut order: Vec<usize> = (0..a.nodes.len()).collect();
    order.sort_by_key(|&i| (ha[&ca[i]], ca[i], i));
    let order = connectivity_order(&pa, order);
    let mut search = Search {
        a,
        b,
        pa: &pa,
        ca: &ca,
        cb: &cb,
        order: &order,
        map: vec![None; a.nodes.len()],
        used: vec![false; b.nodes.len()],
        counts: HashMap::new(),
        b_count: &b_count,
        fixed,
        symmetric,
        steps: 0,
    };
    if search.go(0) {
        Some(
            search
                .map
                .iter()
                .enumerate()
                .map(|(i, m)| (a.nodes[i].clone(), b.nodes[m.expect("complete")].clone()))
                .collect(),
        )
    } else {
        None
    }
}

fn connectivity_order(p: &Prepared, base: Vec<usize>) -> Vec<usize> {
    let n = base.len();
    let mut placed = vec![false; n];
    let mut out = Vec::with_capacity(n);
    let rank: Vec<usize> = {
        let mut r = vec![0; n];
        for (k, &i) in base.iter().enumerate() {
            r[i] = k;
        }
        r
    };
    while out.len() < n {
        let start = *base.iter().find(|&&i| !placed[i]).expect("remaining");
        placed[start] = true;
        out.push(start);
        let mut k = out.len() - 1;
        while k < out.len() {
            let cur = out[k];
            let mut nbrs: Vec<usize> = Vec::new();
            for &(e, _) in &p.incident[cur] {
                for m in &p.g.edges[e].1 {
                    let j = p.index[m];
                    if !placed[j] && !nbrs.contains(&j) {
                        nbrs.push(j);
                    }
                }
            }
            nbrs.sort_by_key(|&j| rank[j]);
            for j in nbrs {
                placed[j] = true;
                out.push(j);
            }
            k += 1;
        }
    }
    out
}

struct Search<'a> {
    a: &'a HGraph,
    b: &'a HGraph,
    pa: &'a Prepared<'a>,
    ca: &'a [u64],
    cb: &'a [u64],
    order: &'a [usize],
    map: Vec<Option<usize>>,
    used: Vec<bool>,
    counts: HashMap<EdgeKey, usize>,
    b_count: &'a HashMap<EdgeKey, usize>,
    fixed: &'a BTreeMap<Name, Name>,
    symmetric: &'a dyn Fn(&str) -> bool,
    steps: usize,
}

impl Search<'_> {
    fn go(&mut self, k: usize) -> bool {
        if k == self.order.len() {
            return true;
        }
        self.steps += 1;
        let i = self.order[k];
        let candidates: Vec<usize> = match self.fixed.get(&self.a.nodes[i]) {
            Some(y) => self.b.nodes.iter().position(|n| n == y).into_iter().collect(),
            None => (0..self.b.nodes.len()).filter(|&j| self.cb[j] == self.ca[i]).collect(),
        };
        for j in candidates {
            if self.used[j] || self.cb[j] != self.ca[i] {
                continue;
            }
            self.map[i] = Some(j);
            self.used[j] = true;
            let mut added: Vec<EdgeKey> = Vec::new();
            let mut done: Vec<usize> = Vec::new();
            let mut ok = true;
            for &(e, _) in &self.pa.incident[i] {
                let (l, att) = &self.a.edges[e];
                if att.iter().any(|n| self.map[self.pa.index[n]].is_none()) {
                    continue;
                }
                // An edge with several tentacles on this node is counted once.
                if done.contains(&e) {
                    continue;
                }
                done.push(e);
                let img: Vec<Name> =
                    att.iter().map(|n| self.b.nodes[self.map[self.pa.index[n]].unwrap()].clone()).collect();
                let kk = key(l, img, self.symmetric);
                let c = self.counts.entry(kk.clone()).or_insert(0);
                *c += 1;
                added.push(kk.clone());
                if *c > *self.b_count.get(&kk).unwrap_or(&0) {
                    ok = false;
                    break;
                }
            }
            if ok && self.go(k + 1) {
                return true;
            }
            for kk in added {
                *self.counts.get_mut(&kk).expect("counted") -= 1;
            }
            self.map[i] = None;
            self.used[j] = false;
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(nodes: &[&str], edges: &[(&str, &[&str])]) -> HGraph {
        HGraph {
            nodes: nodes.iter().map(|n| Name::from(*n)).collect(),
            edges: edges.iter().map(|(l, a)| (l.to_string(), a.iter().map(|n| Name::from(*n)).collect())).collect(),
        }
    }

    #[test]
    fn finds_ring_rotation() {
        let a = g(&["a", "b", "c"], &[("C", &["a", "b"]), ("C", &["b", "c"]), ("C", &["c", "a"])]);
        let b = g(&["x", "y", "z"], &[("C", &["y", "z"]), ("C", &["z", "x"]), ("C", &["x", "y"])]);
        assert!(find_renaming(&a, &b, &BTreeMap::new(), &|_| false).is_some());
        let pin: BTreeMap<Name, Name> = [(Name::from("a"), Name::from("z"))].into();
        let m = find_renaming(&a, &b, &pin, &|_| false).unwrap();
        assert_eq!(m[&Name::from("b")], Name::from("x"));
    }

    #[test]
    fn respects_direction_and_multiplicity() {
        let a = g(&["a", "b"], &[("C", &["a", "b"]), ("C", &["a", "b"])]);
        let b = g(&["a", "b"], &[("C", &["a", "b"]), ("C", &["b", "a"])]);
        assert!(find_renaming(&a, &b, &BTreeMap::new(), &|_| false).is_none());
    }

    #[test]
    fn symmetric_labels_ignore_order() {
        let a = g(&["a", "b", "c"], &[("m3", &["a", "b", "c"]), ("L", &["a"])]);
        let b = g(&["a", "b", "c"], &[("m3", &["c", "a", "b"]), ("L", &["b"])]);
        assert!(find_renaming(&a, &b, &BTreeMap::new(), &|l| l == "m3").is_some());
        assert!(find_renaming(&a, &b, &BTreeMap::new(), &|_| false).is_none());
        let pin: BTreeMap<Name, Name> = [(Name::from("a"), Name::from("a"))].into();
        assert!(find_renaming(&a, &b, &pin, &|l| l == "m3").is_none());
    }

    #[test]
    fn isolated_nodes_count() {
        let a = g(&["a", "b"], &[("L", &["a"])]);
        let b = g(&["a"], &[("L", &["a"])]);
        assert!(find_renaming(&a, &b, &BTreeMap::new(), &|_| false).is_none());
    }
}
