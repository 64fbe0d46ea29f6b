//! The fusion calculus: syntax, normal forms, reductions and structural
//! congruence.

mod alpha;
mod ast;
mod normal;
mod parse;
mod reduce;

pub use alpha::{alpha_equal, alpha_equal_with_depth, DEFAULT_UNFOLD_DEPTH};
pub use ast::{Agent, AgentVar, Prefix};
pub use normal::{
    linearize, normalize, prefix_arities, process_label, standard_form, std_name, substitutive_effect, FusionError,
    LinearDecomposition, NormalForm, NormalFormView,
};
pub use parse::{freshen_binders, parse_agent, parse_agent_raw, FusionParseError};
pub use reduce::{reductions, Reduction, ReductionLabel};
