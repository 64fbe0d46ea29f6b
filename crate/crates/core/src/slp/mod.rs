//! Synchronized logic programming: goal-graphs, synchronized clauses, SLD
//! small steps and transactional big-steps.

mod bigstep;
mod equal;
mod sld;
mod syntax;
mod validate;

pub use bigstep::{
    acting_vars, admit_any, big_step_for, big_steps, big_steps_with, closed_form, BigStep, BigStepError,
    BigStepOptions, SelectionAdmit,
};
pub use equal::observably_equal;
pub use sld::{fresh_variant, replay, replay_in_order, sld_step, Replay, SldError, SmallStep};
pub use syntax::{
    parse_goal, parse_program, parse_slp, Atom, Clause, Goal, GoalGraph, Program, SlpFile, SlpParseError,
    SynchronizedClause,
};
pub use validate::{is_synchronized, validate_clause, Violation};
