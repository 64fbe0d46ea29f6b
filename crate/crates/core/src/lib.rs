//! Fusion calculus, hypergraph rewriting with Hoare synchronization, and
//! synchronized logic programming, together with the translations that
//! connect them and the oracles used to cross-check those translations.

pub mod fusion;
pub mod fusion2hshr;
pub mod hshr;
pub mod hshr2slp;
pub mod lex;
pub mod name;
pub mod oracles;
pub mod slp;
pub mod term;

pub use name::{FreshGen, Name};
pub use term::{compose, eqn, mgu, Substitution, Symbol, Term, UnifyError};
