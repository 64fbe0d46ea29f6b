//! Brute-force and randomized oracles used to cross-check the engines on
//! small instances. Their checking logic is written independently of the
//! code under test.

mod amoeboid;
mod lemmas;
mod procgen;
mod prodgen;
mod sweep;
mod unify;

pub use amoeboid::{amoeboid_sweep, check_amoeboid, structured_amoeboids, AmoeboidVerdict, MAX_N};
pub use lemmas::{check_det, check_injren, verify_renaming};
pub use procgen::{gen_process, gen_processes, SweepConfig};
pub use prodgen::{check_production_set, gen_production_set, CorrespondenceVerdict, ProductionSet};
pub use sweep::{check_process, productions_for_graph, theorem_sweep, Counterexample, InstanceVerdict, SweepReport};
pub use unify::{
    brute_bounds_for, brute_unify, check_mgu, check_mgu_composition, random_equations, random_idempotent,
    BoundExceeded, UnifyVerdict, MAX_CANDIDATES, MAX_DEPTH, MAX_POOL,
};
