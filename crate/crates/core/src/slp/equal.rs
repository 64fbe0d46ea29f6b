use std::collections::{BTreeMap, BTreeSet};

use super::syntax::Goal;
use crate::hshr::{find_renaming, HGraph};
use crate::name::Name;
use crate::term::{Substitution, Term};

/// Renames each variable that is the common image of a class of `keep`
/// variables to the least member of the class, so that choices of class
/// representatives do not matter.
fn canonical(keep: &BTreeSet<Name>, theta: &Substitution, end: &Goal) -> (BTreeMap<Name, Term>, Goal) {
    let mut classes: BTreeMap<Name, Name> = BTreeMap::new();
    for x in keep {
        if let Term::Var(v) = theta.apply_name(x) {
            let r = classes.entry(v).or_insert_with(|| x.clone());
            if *x < *r {
                *r = x.clone();
            }
        }
    }
    let kappa = Substitution::renaming(classes);
    let images = keep.iter().map(|x| (x.clone(), kappa.apply(&theta.apply_name(x)))).collect();
    (images, end.apply(&kappa))
}

struct Encoder {
    g: HGraph,
    aux: u32,
}

impl Encoder {
    /// Node standing for `t`; compound terms get an auxiliary node.
    fn term(&mut self, t: &Term) -> Name {
        match t {
            Term::Var(v) => {
                self.g.add_nodes([v]);
                v.clone()
            }
            Term::App(f, args) => {
                self.aux += 1;
                let node = Name::Fresh("#t".into(), self.aux);
                self.g.add_nodes([&node]);
                let mut att = vec![node.clone()];
                att.extend(args.iter().map(|a| self.term(a)));
                self.g.add_edge(format!("F:{f}/{}", args.len()), att);
                node
            }
        }
    }
}

fn encode(images: &BTreeMap<Name, Term>, end: &Goal) -> HGraph {
    let mut e = Encoder { g: HGraph::default(), aux: 0 };
    for (x, t) in images {
        e.g.add_nodes([x]);
        let n = e.term(t);
        e.g.add_edge("θ", vec![x.clone(), n]);
    }
    for a in &end.atoms {
        let att: Vec<Name> = a.args.iter().map(|t| e.term(t)).collect();
        e.g.add_edge(format!("A:{}/{}", a.pred, a.args.len()), att);
    }
    e.g
}

/// Whether two results of big-steps from a goal with variables `keep` are
/// equal up to an injective renaming of the variables outside `keep` and up
/// to the choice of representatives for identified variables of `keep`.
pub fn observably_equal(keep: &BTreeSet<Name>, a: (&Substitution, &Goal), b: (&Substitution, &Goal)) -> bool {
    let (ia, ea) = canonical(keep, a.0, a.1);
    let (ib, eb) = canonical(keep, b.0, b.1);
    let pinned: BTreeMap<Name, Name> = keep.iter().map(|x| (x.clone(), x.clone())).collect();
    find_renaming(&encode(&ia, &ea), &encode(&ib, &eb), &pinned, &|_| false).is_some()
}
