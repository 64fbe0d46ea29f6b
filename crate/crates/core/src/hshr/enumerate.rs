use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::derive::{derive_transition, DeriveOptions};
use super::equal::transitions_equal_fixing_source;
use super::graph::{Choice, Judgement, Production, Transition};
use crate::name::Name;
use crate::term::Symbol;

/// Supplies the productions that may rewrite an edge with a given label and
/// rank. Sources may build productions on demand.
pub trait ProductionSource {
    fn productions_for(&self, label: &Symbol, rank: usize) -> Vec<Arc<Production>>;
}

impl ProductionSource for [Arc<Production>] {
    fn productions_for(&self, label: &Symbol, rank: usize) -> Vec<Arc<Production>> {
        self.iter().filter(|p| p.lhs.label == *label && p.lhs.att.len() == rank).cloned().collect()
    }
}

impl ProductionSource for Vec<Arc<Production>> {
    fn productions_for(&self, label: &Symbol, rank: usize) -> Vec<Arc<Production>> {
        self.as_slice().productions_for(label, rank)
    }
}

/// Prunes partial choice maps: receives the choice for each edge so far,
/// `None` where no choice has been made yet, and whether the map is complete.
pub type Admit<'a> = dyn Fn(&[Option<&Choice>], bool) -> bool + Sync + 'a;

#[derive(Clone, Copy, Debug)]
pub struct EnumOptions {
    /// Stop after this many complete choice maps.
    pub max_choice_maps: usize,
    /// Skip derivations that create more fresh nodes than this.
    pub fresh_budget: usize,
    pub derive: DeriveOptions,
}

impl Default for EnumOptions {
    fn default() -> EnumOptions {
        EnumOptions { max_choice_maps: 100_000, fresh_budget: 64, derive: DeriveOptions::default() }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Enumeration {
    pub transitions: Vec<Transition>,
    /// Complete choice maps that passed the Hoare check.
    pub choice_maps: usize,
    /// Set when a bound cut the search short.
    pub incomplete: bool,
}

/// Per-position action signature of a candidate.
type Sig = Option<(Symbol, usize)>;

struct Candidate {
    choice: Choice,
    sigs: Vec<Sig>,
}

fn candidates(g: &Judgement, src: &(impl ProductionSource + ?Sized)) -> Vec<Vec<Candidate>> {
    g.edges
        .iter()
        .map(|e| {
            let mut cs = vec![Candidate { choice: Choice::Idle, sigs: vec![None; e.att.len()] }];
            for p in src.productions_for(&e.label, e.att.len()) {
                let sigs = p.lhs.att.iter().map(|x| p.label.act(x).signature()).collect();
                cs.push(Candidate { choice: Choice::Use(p), sigs });
            }
            cs
        })
        .collect()
}

struct Search<'a> {
    g: &'a Judgement,
    cands: Vec<Vec<Candidate>>,
    admit: &'a Admit<'a>,
    opts: EnumOptions,
    node_sig: HashMap<Name, (Sig, usize)>,
    assigned: Vec<Option<usize>>,
    complete: Vec<Vec<usize>>,
    incomplete: bool,
}

impl Search<'_> {
    fn consistent(&self, e: usize, c: usize) -> bool {
        let edge = &self.g.edges[e];
        let cand = &self.cands[e][c];
        // Loops may meet the same node twice within one edge.
        let mut local: HashMap<&Name, &Sig> = HashMap::new();
        for (x, s) in edge.att.iter().zip(&cand.sigs) {
            if let Some((t, _)) = self.node_sig.get(x) {
                if t != s {
                    return false;
                }
            }
            if let Some(t) = local.insert(x, s) {
                if t != s {
                    return false;
                }
            }
        }
        true
    }

    fn assign(&mut self, e: usize, c: usize) {
        for (x, s) in self.g.edges[e].att.iter().zip(&self.cands[e][c].sigs) {
            self.node_sig.entry(x.clone()).or_insert((s.clone(), 0)).1 += 1;
        }
        self.assigned[e] = Some(c);
    }

    fn unassign(&mut self, e: usize) {
        for x in &self.g.edges[e].att {
            let entry = self.node_sig.get_mut(x).expect("assigned node");
            entry.1 -= 1;
            if entry.1 == 0 {
                self.node_sig.remove(x);
            }
        }
        self.assigned[e] = None;
    }

    fn partial(&self) -> Vec<Option<&Choice>> {
        self.assigned.iter().enumerate().map(|(e, c)| c.map(|c| &self.cands[e][c].choice)).collect()
    }

    fn run(&mut self) {
        if self.complete.len() >= self.opts.max_choice_maps {
            self.incomplete = true;
            return;
        }
        // Most constrained unassigned edge first.
        let mut best: Option<(usize, Vec<usize>)> = None;
        for e in 0..self.g.edges.len() {
            if self.assigned[e].is_some() {
                continue;
            }
            let ok: Vec<usize> = (0..self.cands[e].len()).filter(|&c| self.consistent(e, c)).collect();
            if best.as_ref().is_none_or(|(_, b)| ok.len() < b.len()) {
                let done = ok.is_empty();
                best = Some((e, ok));
                if done {
                    break;
                }
            }
        }
        let Some((e, options)) = best else {
            if (self.admit)(&self.partial(), true) {
                self.complete.push(self.assigned.iter().map(|c| c.expect("complete")).collect());
            }
            return;
        };
        for c in options {
            self.assign(e, c);
            if (self.admit)(&self.partial(), false) {
                self.run();
            }
            self.unassign(e);
            if self.incomplete {
                return;
            }
        }
    }
}

/// All transitions of `g` derivable from `src`, one per class of
/// renamings that fix the source nodes. Isolated nodes take ε.
pub fn enumerate_transitions(
    g: &Judgement,
    src: &(impl ProductionSource + ?Sized),
    admit: &Admit<'_>,
    opts: EnumOptions,
) -> Enumeration {
    let mut search = Search {
        g,
        cands: candidates(g, src),
        admit,
        opts,
        node_sig: HashMap::new(),
        assigned: vec![None; g.edges.len()],
        complete: Vec::new(),
        incomplete: false,
    };
    search.run();
    let mut out =
        Enumeration { choice_maps: search.complete.len(), incomplete: search.incomplete, ..Enumeration::default() };
    let mut buckets: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for picks in &search.complete {
        let choice: Vec<Choice> = picks.iter().enumerate().map(|(e, &c)| search.cands[e][c].choice.clone()).collect();
        let Ok(t) = derive_transition(g, &choice, &BTreeMap::new(), opts.derive) else {
            continue;
        };
        if t.target.nodes.difference(&g.nodes).count() > opts.fresh_budget {
            out.incomplete = true;
            continue;
        }
        let key = fingerprint(&t);
        let bucket = buckets.entry(key).or_default();
        if bucket.iter().any(|&i| transitions_equal_fixing_source(&out.transitions[i], &t)) {
            continue;
        }
        bucket.push(out.transitions.len());
        out.transitions.push(t);
    }
    out
}

/// Renaming-invariant summary used to bucket transitions before the exact
/// comparison.
fn fingerprint(t: &Transition) -> String {
    let mut acts: Vec<String> = t
        .label
        .lambda
        .iter()
        .map(|(x, a)| match a.signature() {
            None => format!("{x}:eps"),
            Some((s, n)) => format!("{x}:{s}/{n}"),
        })
        .collect();
    acts.sort();
    let pi: Vec<String> = t.label.pi.iter().map(|(k, v)| format!("{v}/{k}")).collect();
    let profile: Vec<String> = t.target.label_profile().iter().map(|((l, r), c)| format!("{l}/{r}x{c}")).collect();
    format!("{}|{}|{}|{}", acts.join(","), pi.join(","), profile.join(","), t.target.nodes.len())
}

/// Accepts every choice map.
pub fn admit_all(_: &[Option<&Choice>], _: bool) -> bool {
    true
}
