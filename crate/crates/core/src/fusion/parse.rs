use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use super::ast::{Agent, AgentVar, Prefix};
use crate::lex::{Cursor, SyntaxError, Tok};
use crate::name::{FreshGen, Name};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FusionParseError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("{line}:{col}: unguarded occurrence of recursion variable {var}")]
    UnguardedRecursion { line: usize, col: usize, var: String },
    #[error("{line}:{col}: agent variable {var} is not bound by rec")]
    FreeAgentVar { line: usize, col: usize, var: String },
}

/// Parses a closed agent and renames binders so that every bound name is
/// distinct from every other bound name and from the free names.
pub fn parse_agent(src: &str) -> Result<Agent, FusionParseError> {
    let mut p = Parser { cur: Cursor::new(src)?, recs: Vec::new(), guard_depth: 0 };
    let a = p.proc()?;
    if !p.cur.at_eof() {
        return Err(p.cur.error(format!("unexpected `{}`", p.cur.peek())).into());
    }
    Ok(freshen_binders(&a))
}

/// Parses without renaming binders. Agent variables must still be bound.
pub fn parse_agent_raw(src: &str) -> Result<Agent, FusionParseError> {
    let mut p = Parser { cur: Cursor::new(src)?, recs: Vec::new(), guard_depth: 0 };
    let a = p.proc()?;
    if !p.cur.at_eof() {
        return Err(p.cur.error(format!("unexpected `{}`", p.cur.peek())).into());
    }
    Ok(a)
}

struct Parser {
    cur: Cursor,
    /// Enclosing `rec` variables with the prefix depth at their binding.
    recs: Vec<(AgentVar, usize)>,
    guard_depth: usize,
}

fn is_lower(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_lowercase()) && s != "rec"
}

fn is_upper(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase())
}

impl Parser {
    fn proc(&mut self) -> Result<Agent, FusionParseError> {
        let mut items = vec![self.sum()?];
        while self.cur.eat("|") {
            items.push(self.sum()?);
        }
        Ok(Agent::par_all(items))
    }

    fn sum(&mut self) -> Result<Agent, FusionParseError> {
        let (line, col) = self.cur.here();
        let first = self.unit()?;
        if !self.cur.at("+") {
            return Ok(first);
        }
        let mut branches = Vec::new();
        let mut push = |a: Agent, line: usize, col: usize| match a {
            Agent::Sum(bs) => {
                branches.extend(bs);
                Ok(())
            }
            _ => Err(SyntaxError { line, col, message: "summands must be prefixed agents".into() }),
        };
        push(first, line, col)?;
        while self.cur.eat("+") {
            let (line, col) = self.cur.here();
            let u = self.unit()?;
            push(u, line, col)?;
        }
        Ok(Agent::Sum(branches))
    }

    fn names_until(&mut self, close: &str) -> Result<Vec<Name>, FusionParseError> {
        let mut out = Vec::new();
        while !self.cur.at(close) {
            let s = self.cur.ident()?;
            if !is_lower(&s) {
                return Err(self.cur.error(format!("`{s}` is not a name")).into());
            }
            out.push(Name::parse(&s));
            self.cur.eat(",");
        }
        self.cur.expect(close)?;
        Ok(out)
    }

    fn name(&mut self) -> Result<Name, FusionParseError> {
        let s = self.cur.ident()?;
        if !is_lower(&s) {
            return Err(self.cur.error(format!("`{s}` is not a name")).into());
        }
        Ok(Name::parse(&s))
    }

    fn looks_like_scope(&self) -> bool {
        let mut k = 1;
        let mut seen = false;
        loop {
            match self.cur.peek_at(k) {
                Tok::Ident(s) if is_lower(s) => seen = true,
                Tok::Punct(",") => {}
                Tok::Punct(")") => return seen,
                _ => return false,
            }
            k += 1;
        }
    }

    fn continuation(&mut self, p: Prefix) -> Result<Agent, FusionParseError> {
        self.cur.expect(".")?;
        self.guard_depth += 1;
        let cont = self.unit();
        self.guard_depth -= 1;
        Ok(Agent::prefixed(p, cont?))
    }

    fn unit(&mut self) -> Result<Agent, FusionParseError> {
        let (line, col) = self.cur.here();
        match self.cur.peek().clone() {
            Tok::Number(n) if n == "0" => {
                self.cur.advance();
                Ok(Agent::Nil)
            }
            Tok::Punct("'") => {
                self.cur.advance();
                let chan = self.name()?;
                let args = if self.cur.eat("<") { self.names_until(">")? } else { Vec::new() };
                self.continuation(Prefix::Output { chan, args })
            }
            Tok::Punct("{") => {
                self.cur.advance();
                let mut pairs = Vec::new();
                while !self.cur.at("}") {
                    let a = self.name()?;
                    self.cur.expect("=")?;
                    let b = self.name()?;
                    pairs.push((a, b));
                    if !self.cur.eat(",") {
                        break;
                    }
                }
                self.cur.expect("}")?;
                self.continuation(Prefix::Fusion(pairs))
            }
            Tok::Punct("(") => {
                if self.looks_like_scope() {
                    self.cur.advance();
                    let names = self.names_until(")")?;
                    let body = self.unit()?;
                    Ok(Agent::scope_all(&names, body))
                } else {
                    self.cur.advance();
                    let p = self.proc()?;
                    self.cur.expect(")")?;
                    Ok(p)
                }
            }
            Tok::Ident(s) if s == "rec" => {
                self.cur.advance();
                let v = self.cur.ident()?;
                if !is_upper(&v) {
                    return Err(self.cur.error("recursion variables start with an uppercase letter").into());
                }
                self.cur.expect(".")?;
                let var: AgentVar = Arc::from(v.as_str());
                self.recs.push((var.clone(), self.guard_depth));
                let body = self.unit();
                self.recs.pop();
                Ok(Agent::Rec(var, Box::new(body?)))
            }
            Tok::Ident(s) if is_upper(&s) => {
                self.cur.advance();
                if self.cur.eat("(") {
                    let args = self.names_until(")")?;
                    return Ok(Agent::Const(Arc::from(s.as_str()), args));
                }
                match self.recs.iter().rev().find(|(v, _)| **v == *s) {
                    None => Err(FusionParseError::FreeAgentVar { line, col, var: s }),
                    Some((_, d)) if *d >= self.guard_depth => {
                        Err(FusionParseError::UnguardedRecursion { line, col, var: s })
                    }
                    Some((v, _)) => Ok(Agent::Var(v.clone())),
                }
            }
            Tok::Ident(s) if is_lower(&s) => {
                self.cur.advance();
                let chan = Name::parse(&s);
                let args = if self.cur.eat("<") { self.names_until(">")? } else { Vec::new() };
                self.continuation(Prefix::Input { chan, args })
            }
            t => Err(self.cur.error(format!("unexpected `{t}`")).into()),
        }
    }
}

/// Renames binders, innermost first, until all bound names are pairwise
/// distinct and distinct from the free names.
pub fn freshen_binders(a: &Agent) -> Agent {
    let mut used: BTreeSet<Name> = a.free_names();
    let mut gen = FreshGen::avoiding(a.all_names().iter());
    go(a, &mut used, &mut gen)
}

fn go(a: &Agent, used: &mut BTreeSet<Name>, gen: &mut FreshGen) -> Agent {
    match a {
        Agent::Nil | Agent::Var(_) | Agent::Const(..) => a.clone(),
        Agent::Sum(bs) => Agent::Sum(bs.iter().map(|(p, c)| (p.clone(), go(c, used, gen))).collect()),
        Agent::Par(x, y) => {
            let x2 = go(x, used, gen);
            let y2 = go(y, used, gen);
            Agent::par(x2, y2)
        }
        Agent::Rec(v, b) => Agent::Rec(v.clone(), Box::new(go(b, used, gen))),
        Agent::Scope(x, body) => {
            let body2 = go(body, used, gen);
            if used.insert(x.clone()) {
                Agent::scope(x.clone(), body2)
            } else {
                let y = gen.fresh_like(x);
                used.insert(y.clone());
                let renamed = body2.subst(&[(x.clone(), y.clone())].into(), gen);
                Agent::scope(y, renamed)
            }
        }
    }
}
