use std::fmt::Write;

use super::graph::Judgement;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Bipartite rendering: nodes as circles, edges as boxes, tentacles
/// numbered from 1.
pub fn to_dot(g: &Judgement, title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "graph {} {{", quote(title));
    let _ = writeln!(s, "  node [shape=circle];");
    for n in &g.nodes {
        let _ = writeln!(s, "  {} [label={}];", quote(&format!("n_{n}")), quote(&n.to_string()));
    }
    for (i, e) in g.edges.iter().enumerate() {
        let id = format!("e{i}");
        let _ = writeln!(s, "  {id} [shape=box, label={}];", quote(&e.label));
        for (p, n) in e.att.iter().enumerate() {
            let _ = writeln!(s, "  {id} -- {} [label=\"{}\"];", quote(&format!("n_{n}")), p + 1);
        }
    }
    s.push_str("}\n");
    s
}
