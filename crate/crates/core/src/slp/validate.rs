use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::syntax::Clause;
use crate::name::Name;
use crate::term::Term;

/// A breach of the synchronized-clause conditions. Positions are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// A body argument is not a variable.
    BodyFunction { atom: usize, arg: usize, term: String },
    /// A head argument nests a function term inside another.
    Nested { arg: usize, term: String },
    /// A head argument is a function symbol without arguments.
    Constant { arg: usize, term: String },
    /// A head argument is a function term with a non-variable argument.
    NonVariableArgument { arg: usize, term: String },
    /// A variable head argument that neither the body nor a function term of
    /// the head mentions.
    HeadVarNotInBody { arg: usize, var: Name },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BodyFunction { atom, arg, term } => {
                write!(f, "body atom {atom}, argument {arg}: {term} is not a variable")
            }
            Violation::Nested { arg, term } => write!(f, "head argument {arg}: {term} nests function symbols"),
            Violation::Constant { arg, term } => write!(f, "head argument {arg}: {term} is a constant"),
            Violation::NonVariableArgument { arg, term } => {
                write!(f, "head argument {arg}: {term} has a non-variable argument")
            }
            Violation::HeadVarNotInBody { arg, var } => {
                write!(f, "head argument {arg}: variable {var} does not occur in the body")
            }
        }
    }
}

/// Checks that the body is a goal-graph and that every head argument is a
/// function symbol of arity at least one applied to variables, or a variable
/// occurring in the body or inside such a head argument.
pub fn validate_clause(c: &Clause) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, a) in c.body.atoms.iter().enumerate() {
        for (j, t) in a.args.iter().enumerate() {
            if !t.is_function_free() {
                out.push(Violation::BodyFunction { atom: i + 1, arg: j + 1, term: t.to_string() });
            }
        }
    }
    // A bare head variable may also be justified by an occurrence inside a
    // head function term: the node is then synchronized on.
    let mut covered: BTreeSet<Name> = c.body.vars();
    for t in c.head.args.iter().filter(|t| !t.is_function_free()) {
        t.collect_vars(&mut covered);
    }
    for (j, t) in c.head.args.iter().enumerate() {
        let arg = j + 1;
        match t {
            Term::Var(x) if !covered.contains(x) => out.push(Violation::HeadVarNotInBody { arg, var: x.clone() }),
            Term::Var(_) => {}
            Term::App(_, args) if args.is_empty() => out.push(Violation::Constant { arg, term: t.to_string() }),
            Term::App(_, args) => {
                if args.iter().any(|a| matches!(a, Term::App(..))) {
                    let nested = args.iter().any(|a| matches!(a, Term::App(_, xs) if !xs.is_empty()));
                    out.push(if nested {
                        Violation::Nested { arg, term: t.to_string() }
                    } else {
                        Violation::NonVariableArgument { arg, term: t.to_string() }
                    });
                }
            }
        }
    }
    out
}

pub fn is_synchronized(c: &Clause) -> bool {
    validate_clause(c).is_empty()
}
