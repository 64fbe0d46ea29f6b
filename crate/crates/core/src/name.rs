//! Names and fresh-name generation.
//!
//! A [`Name`] is either written by a user or produced by a [`FreshGen`].
//! Generated names carry a numeric index and print as `base'index`, so a
//! generator seeded above every index already in use can never collide with
//! an existing name.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

/// An opaque, totally ordered name. User names sort before generated ones.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Name {
    User(Arc<str>),
    Fresh(Arc<str>, u32),
}

impl Name {
    pub fn user(s: &str) -> Name {
        Name::User(Arc::from(s))
    }

    /// Base text without the generation index.
    pub fn base(&self) -> &str {
        match self {
            Name::User(s) | Name::Fresh(s, _) => s,
        }
    }

    pub fn is_fresh(&self) -> bool {
        matches!(self, Name::Fresh(..))
    }

    /// Parses the printed form back, so `x'3` yields a generated name.
    pub fn parse(text: &str) -> Name {
        if let Some((base, idx)) = text.rsplit_once('\'') {
            if let Ok(i) = idx.parse::<u32>() {
                if !base.is_empty() {
                    return Name::Fresh(Arc::from(base), i);
                }
            }
        }
        Name::user(text)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Name::User(s) => f.write_str(s),
            Name::Fresh(s, i) => write!(f, "{s}'{i}"),
        }
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Name {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Name {
        Name::parse(s)
    }
}

/// Deterministic generator of fresh names, one counter per base.
#[derive(Clone, Debug, Default)]
pub struct FreshGen {
    next: BTreeMap<Arc<str>, u32>,
    offset: u32,
}

impl FreshGen {
    pub fn new() -> FreshGen {
        FreshGen::default()
    }

    /// A generator whose counters start above every index in `names`.
    pub fn avoiding<'a>(names: impl IntoIterator<Item = &'a Name>) -> FreshGen {
        let mut g = FreshGen::new();
        g.avoid(names);
        g
    }

    /// Like [`FreshGen::avoiding`] but every counter is shifted by `seed`.
    pub fn seeded<'a>(names: impl IntoIterator<Item = &'a Name>, seed: u32) -> FreshGen {
        let mut g = FreshGen::avoiding(names);
        g.offset = seed;
        g
    }

    pub fn avoid<'a>(&mut self, names: impl IntoIterator<Item = &'a Name>) {
        for n in names {
            let (base, floor) = match n {
                Name::Fresh(b, i) => (b.clone(), i + 1),
                Name::User(b) => (b.clone(), 1),
            };
            let e = self.next.entry(base).or_insert(1);
            if *e < floor {
                *e = floor;
            }
        }
    }

    /// A fresh name sharing the base text of `like`.
    pub fn fresh_like(&mut self, like: &Name) -> Name {
        self.fresh(like.base())
    }

    pub fn fresh(&mut self, base: &str) -> Name {
        let e = self.next.entry(Arc::from(base)).or_insert(1);
        let idx = (*e).max(1) + self.offset;
        *e = idx + 1 - self.offset;
        Name::Fresh(Arc::from(base), idx)
    }

    /// Total number of names handed out or reserved so far.
    pub fn issued(&self) -> u32 {
        self.next.values().map(|v| v - 1).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn users_sort_before_generated() {
        assert!(Name::user("z") < Name::Fresh(Arc::from("a"), 1));
        assert!(Name::user("a") < Name::user("b"));
    }

    #[test]
    fn printed_form_round_trips() {
        let n = Name::Fresh(Arc::from("x"), 7);
        assert_eq!(Name::parse(&n.to_string()), n);
        assert_eq!(Name::parse("x"), Name::user("x"));
    }

    #[test]
    fn generator_avoids_existing_indices() {
        let used = [Name::parse("x'4"), Name::user("y")];
        let mut g = FreshGen::avoiding(used.iter());
        assert_eq!(g.fresh("x"), Name::parse("x'5"));
        assert_eq!(g.fresh("x"), Name::parse("x'6"));
        assert_eq!(g.fresh("y"), Name::parse("y'1"));
    }

    #[test]
    fn seeded_generators_differ_but_stay_fresh() {
        let used = [Name::parse("x'2")];
        let mut a = FreshGen::seeded(used.iter(), 0);
        let mut b = FreshGen::seeded(used.iter(), 10);
        let na = a.fresh("x");
        let nb = b.fresh("x");
        assert_ne!(na, nb);
        assert!(!used.contains(&na) && !used.contains(&nb));
        assert_ne!(b.fresh("x"), nb);
    }
}
