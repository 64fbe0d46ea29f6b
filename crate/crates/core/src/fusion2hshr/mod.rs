//! Translation of fusion processes into hypergraphs with Hoare
//! synchronization, with the auxiliary machinery needed to compare the two
//! semantics: amoeboid analysis, graph normalization and the interleaving
//! filter.

mod amoeboid;
mod filter;
mod productions;
mod translate;

pub use amoeboid::{
    amoeboid_components, classify_amoeboid, graphs_equal_up_to_renaming, is_amoeboid_edge, normalize_graph,
    normalized_equal, AmoeboidClass, AmoeboidReport, NotAmoeboid,
};
pub use filter::{
    filtered_transitions, interleaving_admit, interleaving_filter, provenance_summary, translate_with_productions,
};
pub use productions::{
    auxiliary_production, label_agent, process_productions, FusionProductions, ProductionBuildError, ProductionOptions,
};
pub use translate::{
    amoeboids, connector, connector_rank, in_action, is_process_label, out_action, sequential_edge, translate_agent,
    translate_prefix, translate_process, TranslateError, CLOSE,
};
