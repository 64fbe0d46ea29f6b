//! Hypergraphs as syntactic judgements, productions, and transitions
//! derived with Hoare synchronization.

mod derive;
mod dot;
mod enumerate;
mod equal;
mod graph;
mod iso;
mod syntax;

pub use derive::{derive_transition, derive_with, fresh_copy, DeriveError, DeriveOptions};
pub use dot::to_dot;
pub use enumerate::{admit_all, enumerate_transitions, Admit, EnumOptions, Enumeration, ProductionSource};
pub use equal::{
    canonical_fresh, graph_congruent, rename_transition, transition_renaming, transitions_equal_fixing_source,
    transitions_equal_up_to_renaming, NotInjective,
};
pub use graph::{Act, Choice, Edge, IllFormed, Judgement, Production, ProductionError, Transition, TransitionLabel};
pub use iso::{find_renaming, HGraph};
pub use syntax::{parse_graph, parse_hg_file, parse_new_nodes, parse_production, print_hg_file, HgFile, HgParseError};
