//! Translation of hypergraph rewriting with Hoare synchronization into
//! synchronized logic programming, and the checks relating transitions to
//! big-steps.

mod check;
mod translate;

pub use check::{check_correspondence, choices_for, lift, matches, selection_for, CorrespondenceReport, Witness};
pub use translate::{
    associated_substitution, canonical_rho, goal_to_judgement, translate_judgement, translate_production,
    translate_productions, AssociatedSubstitution, ClauseOptions, NotGoalGraph, NotSynchronized, FOO,
};
