//! Text syntax for graphs and productions.
//!
//! ```text
//! nodes u, x, y; C(x, y) | C(y, x)
//! split: C(x, y) --[x: r<w>, y: r<w> ; y/x]--> nodes +w; S(y, w)
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use super::graph::{Act, Edge, Judgement, Production, ProductionError, TransitionLabel};
use crate::lex::{Cursor, SyntaxError, Tok};
use crate::name::Name;
use crate::term::Symbol;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HgParseError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("line {line}: {source}")]
    Production { line: usize, source: ProductionError },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
}

struct P {
    cur: Cursor,
}

impl P {
    fn new(src: &str) -> Result<P, SyntaxError> {
        Ok(P { cur: Cursor::new(src)? })
    }

    fn symbol(&mut self) -> Result<Symbol, SyntaxError> {
        match self.cur.peek().clone() {
            Tok::Ident(s) | Tok::Quoted(s) => {
                self.cur.advance();
                Ok(Arc::from(s.as_str()))
            }
            t => Err(self.cur.error(format!("expected a symbol, found `{t}`"))),
        }
    }

    fn name(&mut self) -> Result<Name, SyntaxError> {
        Ok(Name::parse(&self.cur.ident()?))
    }

    /// Names separated by optional commas, up to `close`.
    fn names_until(&mut self, close: &str) -> Result<Vec<Name>, SyntaxError> {
        let mut out = Vec::new();
        while !self.cur.at(close) {
            out.push(self.name()?);
            self.cur.eat(",");
        }
        self.cur.expect(close)?;
        Ok(out)
    }

    fn edge(&mut self) -> Result<Edge, SyntaxError> {
        let label = self.symbol()?;
        self.cur.expect("(")?;
        let att = self.names_until(")")?;
        Ok(Edge { label, att })
    }

    fn at_nodes(&self) -> bool {
        matches!(self.cur.peek(), Tok::Ident(s) if s == "nodes") && !matches!(self.cur.peek_at(1), Tok::Punct("("))
    }

    /// `nodes a, +b;` header. Returns the listed names.
    fn node_list(&mut self) -> Result<Vec<Name>, SyntaxError> {
        let mut out = Vec::new();
        if !self.at_nodes() {
            return Ok(out);
        }
        self.cur.advance();
        while !self.cur.at(";") {
            self.cur.eat("+");
            out.push(self.name()?);
            self.cur.eat(",");
        }
        self.cur.expect(";")?;
        Ok(out)
    }

    fn edges(&mut self) -> Result<Vec<Edge>, SyntaxError> {
        if matches!(self.cur.peek(), Tok::Ident(s) if s == "nil") && !matches!(self.cur.peek_at(1), Tok::Punct("(")) {
            self.cur.advance();
            return Ok(Vec::new());
        }
        let mut out = vec![self.edge()?];
        while self.cur.eat("|") {
            out.push(self.edge()?);
        }
        Ok(out)
    }

    fn act(&mut self) -> Result<Act, SyntaxError> {
        let sym = self.symbol()?;
        if !self.cur.at("<") && &*sym == "eps" {
            return Ok(Act::Eps);
        }
        self.cur.expect("<")?;
        let ys = self.names_until(">")?;
        Ok(Act::Do(sym, ys))
    }

    fn label(&mut self) -> Result<TransitionLabel, SyntaxError> {
        let mut label = TransitionLabel::default();
        while !self.cur.at("]") && !self.cur.at(";") {
            let x = self.name()?;
            self.cur.expect(":")?;
            let a = self.act()?;
            if !a.is_eps() {
                label.lambda.insert(x, a);
            }
            if !self.cur.eat(",") {
                break;
            }
        }
        if self.cur.eat(";") {
            while !self.cur.at("]") {
                let v = self.name()?;
                self.cur.expect("/")?;
                let k = self.name()?;
                if k != v {
                    label.pi.insert(k, v);
                }
                if !self.cur.eat(",") {
                    break;
                }
            }
        }
        self.cur.expect("]")?;
        Ok(label)
    }

    fn end(&self) -> Result<(), SyntaxError> {
        if self.cur.at_eof() {
            Ok(())
        } else {
            Err(self.cur.error(format!("unexpected `{}`", self.cur.peek())))
        }
    }

    fn graph(&mut self) -> Result<Judgement, SyntaxError> {
        let nodes = self.node_list()?;
        let edges = self.edges()?;
        self.end()?;
        Ok(Judgement::with_attached(nodes, edges))
    }

    fn production(&mut self) -> Result<Production, SyntaxError> {
        let name = match (self.cur.peek().clone(), self.cur.peek_at(1)) {
            (Tok::Ident(s), Tok::Punct(":")) => {
                self.cur.advance();
                self.cur.advance();
                Some(s)
            }
            _ => None,
        };
        let lhs = self.edge()?;
        self.cur.expect("--")?;
        self.cur.expect("[")?;
        let label = self.label()?;
        self.cur.expect("-->")?;
        let extra = self.node_list()?;
        let edges = self.edges()?;
        self.end()?;
        let mut nodes: BTreeSet<Name> = lhs.att.iter().map(|x| label.pi_of(x)).collect();
        nodes.extend(label.exposed());
        nodes.extend(extra);
        Ok(Production { name, lhs, label, target: Judgement::with_attached(nodes, edges) })
    }
}

pub fn parse_graph(src: &str) -> Result<Judgement, SyntaxError> {
    P::new(src)?.graph()
}

/// Parses and validates one production.
pub fn parse_production(src: &str) -> Result<Production, HgParseError> {
    let p = P::new(src)?.production()?;
    p.validate().map_err(|source| HgParseError::Production { line: 1, source })?;
    Ok(p)
}

/// A graph together with productions, as read from a `.hg` file.
#[derive(Clone, Debug, Default)]
pub struct HgFile {
    pub graph: Option<Judgement>,
    pub productions: Vec<Arc<Production>>,
}

fn shift(mut e: SyntaxError, line: usize) -> SyntaxError {
    e.line += line - 1;
    e
}

/// Line-based: every line containing `-->` is a production, and at most one
/// other line gives the graph. `#` starts a comment.
pub fn parse_hg_file(src: &str) -> Result<HgFile, HgParseError> {
    let mut out = HgFile::default();
    for (i, text) in src.lines().enumerate() {
        let line = i + 1;
        let mut p = P::new(text).map_err(|e| shift(e, line))?;
        if p.cur.at_eof() {
            continue;
        }
        let is_production =
            crate::lex::lex(text).map_err(|e| shift(e, line))?.iter().any(|t| t.tok == Tok::Punct("-->"));
        if is_production {
            let prod = p.production().map_err(|e| shift(e, line))?;
            prod.validate().map_err(|source| HgParseError::Production { line, source })?;
            out.productions.push(Arc::new(prod));
        } else {
            if out.graph.is_some() {
                return Err(HgParseError::Invalid { line, message: "more than one graph".into() });
            }
            out.graph = Some(p.graph().map_err(|e| shift(e, line))?);
        }
    }
    Ok(out)
}

/// Prints a file that [`parse_hg_file`] reads back.
pub fn print_hg_file(graph: Option<&Judgement>, prods: &[Arc<Production>]) -> String {
    let mut s = String::new();
    if let Some(g) = graph {
        s.push_str(&g.to_string());
        s.push('\n');
    }
    for p in prods {
        if let Some(n) = &p.name {
            s.push_str(&format!("{}: ", crate::lex::symbol_text(n)));
        }
        s.push_str(&p.to_string());
        s.push('\n');
    }
    s
}

/// Parses `x: a<y z>` entries, used to decorate isolated nodes.
pub fn parse_new_nodes(src: &str) -> Result<BTreeMap<Name, (Symbol, Vec<Name>)>, SyntaxError> {
    let mut p = P::new(src)?;
    let mut out = BTreeMap::new();
    while !p.cur.at_eof() {
        let x = p.name()?;
        p.cur.expect(":")?;
        let sym = p.symbol()?;
        p.cur.expect("<")?;
        let ys = p.names_until(">")?;
        out.insert(x, (sym, ys));
        p.cur.eat(",");
    }
    Ok(out)
}
