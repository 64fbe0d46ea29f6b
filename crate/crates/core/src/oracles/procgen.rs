use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::fusion::{Agent, AgentVar, Prefix};
use crate::name::Name;

/// Bounds for randomly generated processes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SweepConfig {
    /// Parallel components at top level.
    pub max_components: usize,
    pub max_arity: usize,
    /// Summands per sum.
    pub max_sum: usize,
    /// Nesting depth of `rec`.
    pub max_rec_depth: usize,
    /// Distinct free names before closing, at most 6.
    pub pool: usize,
    /// Prefixes along any path of a component.
    pub max_prefix_depth: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> SweepConfig {
        SweepConfig {
            max_components: 3,
            max_arity: 2,
            max_sum: 2,
            max_rec_depth: 1,
            pool: 3,
            max_prefix_depth: 2,
            seed: 0,
        }
    }
}

const POOL: [&str; 6] = ["a", "b", "c", "d", "e", "f"];
const REC_VARS: [&str; 3] = ["X", "Y", "Z"];

struct Gen<'a> {
    cfg: &'a SweepConfig,
    rng: ChaCha8Rng,
    locals: usize,
}

impl Gen<'_> {
    fn pick(&mut self, names: &[Name]) -> Name {
        names[self.rng.gen_range(0..names.len())].clone()
    }

    fn prefix(&mut self, names: &[Name]) -> Prefix {
        if names.len() >= 2 && self.rng.gen_bool(0.15) {
            let a = self.pick(names);
            let mut b = self.pick(names);
            while b == a {
                b = self.pick(names);
            }
            return Prefix::Fusion(vec![(a, b)]);
        }
        let chan = self.pick(names);
        let n = self.rng.gen_range(0..=self.cfg.max_arity);
        let args: Vec<Name> = (0..n).map(|_| self.pick(names)).collect();
        if self.rng.gen_bool(0.5) {
            Prefix::Input { chan, args }
        } else {
            Prefix::Output { chan, args }
        }
    }

    fn constant(&mut self, names: &[Name]) -> Agent {
        let n = self.rng.gen_range(0..=2);
        Agent::Const(Arc::from("P"), (0..n).map(|_| self.pick(names)).collect())
    }

    fn sum(&mut self, names: &[Name], depth: usize, recs: &[AgentVar], rec_budget: usize) -> Agent {
        let width = self.rng.gen_range(1..=self.cfg.max_sum.max(1));
        let branches = (0..width)
            .map(|_| {
                let p = self.prefix(names);
                let c = self.continuation(names, depth.saturating_sub(1), recs, rec_budget);
                (p, c)
            })
            .collect();
        Agent::Sum(branches)
    }

    fn continuation(&mut self, names: &[Name], depth: usize, recs: &[AgentVar], rec_budget: usize) -> Agent {
        let roll: f64 = self.rng.gen();
        if !recs.is_empty() && roll < 0.25 {
            return Agent::Var(recs[self.rng.gen_range(0..recs.len())].clone());
        }
        if depth == 0 || roll < 0.45 {
            return Agent::Nil;
        }
        if roll < 0.52 {
            return self.constant(names);
        }
        if roll < 0.62 {
            self.locals += 1;
            let l = Name::user(&format!("l{}", self.locals));
            let mut inner = names.to_vec();
            inner.push(l.clone());
            return Agent::scope(l, self.sum(&inner, depth, recs, rec_budget));
        }
        if rec_budget > 0 && recs.len() < REC_VARS.len() && roll < 0.66 {
            let x: AgentVar = Arc::from(REC_VARS[recs.len()]);
            let mut inner = recs.to_vec();
            inner.push(x.clone());
            let body = self.sum(names, depth, &inner, rec_budget - 1);
            return Agent::Rec(x, Box::new(body));
        }
        if roll < 0.72 {
            let a = self.sum(names, depth, recs, rec_budget);
            let b = self.sum(names, depth, recs, rec_budget);
            return Agent::par(a, b);
        }
        self.sum(names, depth, recs, rec_budget)
    }

    fn component(&mut self, names: &[Name]) -> Agent {
        let depth = self.cfg.max_prefix_depth.max(1);
        let roll: f64 = self.rng.gen();
        if roll < 0.1 {
            return self.constant(names);
        }
        if self.cfg.max_rec_depth > 0 && roll < 0.3 {
            let x: AgentVar = Arc::from(REC_VARS[0]);
            let body = self.sum(names, depth, std::slice::from_ref(&x), self.cfg.max_rec_depth - 1);
            return Agent::Rec(x, Box::new(body));
        }
        self.sum(names, depth, &[], self.cfg.max_rec_depth)
    }

    fn process(&mut self) -> Agent {
        let pool = self.cfg.pool.clamp(1, POOL.len());
        let names: Vec<Name> = POOL[..pool].iter().map(|s| Name::user(s)).collect();
        let k = self.rng.gen_range(1..=self.cfg.max_components.max(1));
        let comps: Vec<Agent> = (0..k).map(|_| self.component(&names)).collect();
        let body = Agent::par_all(comps);
        let free: Vec<Name> = body.free_names().into_iter().collect();
        Agent::scope_all(&free, body)
    }
}

/// The `index`-th process for `cfg`. Every index has its own random stream,
/// so a process does not depend on how many others are generated.
pub fn gen_process(cfg: &SweepConfig, index: u64) -> Agent {
    let seed = cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index);
    let mut g = Gen { cfg, rng: ChaCha8Rng::seed_from_u64(seed), locals: 0 };
    g.process()
}

/// `count` closed processes within the bounds of `cfg`.
pub fn gen_processes(cfg: &SweepConfig, count: usize) -> Vec<Agent> {
    (0..count as u64).map(|i| gen_process(cfg, i)).collect()
}
