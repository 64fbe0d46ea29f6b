use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::lex::{symbol_text, Cursor, SyntaxError, Tok};
use crate::name::Name;
use crate::term::{Substitution, Symbol, Term};

/// A predicate applied to terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: Symbol,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Atom {
        Atom { pred: Arc::from(pred), args }
    }

    /// An atom whose arguments are all variables.
    pub fn of_names(pred: &str, args: &[Name]) -> Atom {
        Atom::new(pred, args.iter().cloned().map(Term::Var).collect())
    }

    pub fn as_term(&self) -> Term {
        Term::App(self.pred.clone(), self.args.clone())
    }

    pub fn apply(&self, s: &Substitution) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|t| s.apply(t)).collect() }
    }

    pub fn vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.args.iter().for_each(|t| t.collect_vars(&mut out));
        out
    }

    pub fn is_function_free(&self) -> bool {
        self.args.iter().all(Term::is_function_free)
    }

    /// Argument variables, when the atom is function-free.
    pub fn var_args(&self) -> Option<Vec<Name>> {
        self.args.iter().map(|t| t.as_var().cloned()).collect()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&symbol_text(&self.pred))?;
        if self.args.is_empty() {
            return Ok(());
        }
        f.write_str("(")?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Atom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A conjunction of atoms. The empty goal prints as `□`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Goal {
    pub atoms: Vec<Atom>,
}

/// A goal without function symbols.
pub type GoalGraph = Goal;

impl Goal {
    pub fn new(atoms: Vec<Atom>) -> Goal {
        Goal { atoms }
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_graph(&self) -> bool {
        self.atoms.iter().all(Atom::is_function_free)
    }

    pub fn vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for a in &self.atoms {
            a.args.iter().for_each(|t| t.collect_vars(&mut out));
        }
        out
    }

    pub fn apply(&self, s: &Substitution) -> Goal {
        Goal { atoms: self.atoms.iter().map(|a| a.apply(s)).collect() }
    }

    /// Atoms as a sorted multiset, for comparisons that ignore order.
    pub fn sorted(&self) -> Vec<Atom> {
        let mut v = self.atoms.clone();
        v.sort();
        v
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("□");
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Goal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A definite clause, optionally named after the production it came from.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub name: Option<String>,
    pub head: Atom,
    pub body: Goal,
}

/// A clause meeting the synchronized-clause conditions.
pub type SynchronizedClause = Clause;

impl Clause {
    pub fn new(head: Atom, body: Goal) -> Clause {
        Clause { name: None, head, body }
    }

    pub fn vars(&self) -> BTreeSet<Name> {
        let mut out = self.head.vars();
        out.extend(self.body.vars());
        out
    }

    pub fn apply(&self, s: &Substitution) -> Clause {
        Clause { name: self.name.clone(), head: self.head.apply(s), body: self.body.apply(s) }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = &self.name {
            write!(f, "{}: ", symbol_text(n))?;
        }
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            write!(f, " :- {}", self.body)?;
        }
        f.write_str(".")
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Clause {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub clauses: Vec<Clause>,
}

impl Program {
    pub fn new(clauses: Vec<Clause>) -> Program {
        Program { clauses }
    }

    pub fn vars(&self) -> BTreeSet<Name> {
        self.clauses.iter().flat_map(Clause::vars).collect()
    }

    /// Indices of the clauses whose head can match `a` by predicate and arity.
    pub fn candidates(&self, a: &Atom) -> Vec<usize> {
        (0..self.clauses.len())
            .filter(|&i| self.clauses[i].head.pred == a.pred && self.clauses[i].head.args.len() == a.args.len())
            .collect()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SlpParseError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("{line}:{col}: function symbol {term} in a query")]
    FunctionInGoal { line: usize, col: usize, term: String },
    #[error("{line}:{col}: constant {term} in a goal")]
    ConstantInGoal { line: usize, col: usize, term: String },
}

/// A program followed by any number of queries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SlpFile {
    pub program: Program,
    pub goals: Vec<Goal>,
}

impl fmt::Display for SlpFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.program)?;
        for g in &self.goals {
            if g.is_empty() {
                writeln!(f, "?- .")?;
            } else {
                writeln!(f, "?- {g}.")?;
            }
        }
        Ok(())
    }
}

/// Parses clauses `h :- b1, b2.` or `h.`, optionally prefixed by `name:`, and
/// queries `?- g1, g2.`. A bare identifier in argument position is a
/// variable and `f(...)` is a function term. Queries must be function-free.
pub fn parse_slp(src: &str) -> Result<SlpFile, SlpParseError> {
    let mut cur = Cursor::new(src)?;
    let mut file = SlpFile::default();
    while !cur.at_eof() {
        if cur.eat("?-") {
            file.goals.push(goal_until_dot(&mut cur, true)?);
            continue;
        }
        let name = match (cur.peek().clone(), cur.peek_at(1).clone()) {
            (Tok::Ident(n) | Tok::Quoted(n), Tok::Punct(":")) => {
                cur.advance();
                cur.advance();
                Some(n)
            }
            _ => None,
        };
        let head = atom(&mut cur)?;
        let body = if cur.eat(":-") {
            goal_until_dot(&mut cur, false)?
        } else {
            cur.expect(".")?;
            Goal::default()
        };
        file.program.clauses.push(Clause { name, head, body });
    }
    Ok(file)
}

pub fn parse_program(src: &str) -> Result<Program, SlpParseError> {
    Ok(parse_slp(src)?.program)
}

/// Parses a goal, with or without the leading `?-` and trailing `.`.
pub fn parse_goal(src: &str) -> Result<Goal, SlpParseError> {
    let mut cur = Cursor::new(src)?;
    cur.eat("?-");
    if cur.at_eof() {
        return Ok(Goal::default());
    }
    let (line, col) = cur.here();
    let g = goal_atoms(&mut cur)?;
    cur.eat(".");
    if !cur.at_eof() {
        return Err(cur.error(format!("unexpected `{}`", cur.peek())).into());
    }
    check_goal(&g, true, line, col)?;
    Ok(g)
}

fn is_constant(t: &Term) -> bool {
    match t {
        Term::Var(_) => false,
        Term::App(_, args) => args.is_empty() || args.iter().any(is_constant),
    }
}

/// Constants are rejected in every goal; queries must also be free of
/// function symbols. Clause bodies with function symbols parse, so that
/// validation can report them.
fn check_goal(g: &Goal, query: bool, line: usize, col: usize) -> Result<(), SlpParseError> {
    for t in g.atoms.iter().flat_map(|a| &a.args) {
        if is_constant(t) {
            return Err(SlpParseError::ConstantInGoal { line, col, term: t.to_string() });
        }
        if query && !t.is_function_free() {
            return Err(SlpParseError::FunctionInGoal { line, col, term: t.to_string() });
        }
    }
    Ok(())
}

fn goal_until_dot(cur: &mut Cursor, query: bool) -> Result<Goal, SlpParseError> {
    let (line, col) = cur.here();
    if cur.eat(".") {
        return Ok(Goal::default());
    }
    let g = goal_atoms(cur)?;
    cur.expect(".")?;
    check_goal(&g, query, line, col)?;
    Ok(g)
}

fn goal_atoms(cur: &mut Cursor) -> Result<Goal, SlpParseError> {
    let mut atoms = vec![atom(cur)?];
    while cur.eat(",") {
        atoms.push(atom(cur)?);
    }
    Ok(Goal { atoms })
}

fn symbol(cur: &mut Cursor) -> Result<String, SlpParseError> {
    match cur.advance() {
        Tok::Ident(s) | Tok::Quoted(s) => Ok(s),
        t => Err(cur.error(format!("expected a symbol, found `{t}`")).into()),
    }
}

fn atom(cur: &mut Cursor) -> Result<Atom, SlpParseError> {
    let pred = symbol(cur)?;
    let args = if cur.eat("(") { term_list(cur)? } else { Vec::new() };
    Ok(Atom::new(&pred, args))
}

fn term_list(cur: &mut Cursor) -> Result<Vec<Term>, SlpParseError> {
    let mut out = Vec::new();
    if cur.eat(")") {
        return Ok(out);
    }
    loop {
        out.push(term(cur)?);
        if cur.eat(")") {
            return Ok(out);
        }
        cur.expect(",")?;
    }
}

fn term(cur: &mut Cursor) -> Result<Term, SlpParseError> {
    let s = symbol(cur)?;
    if cur.eat("(") {
        Ok(Term::app(&s, term_list(cur)?))
    } else {
        Ok(Term::Var(Name::parse(&s)))
    }
}
