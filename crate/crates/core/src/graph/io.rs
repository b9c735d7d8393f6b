//! Line-oriented graph file format.
//!
//! ```text
//! # comment
//! graph <n> <N>
//! alphabet a,b,c
//! node <id> [label,label,...]
//! edge <u> <v>
//! ```

use std::collections::BTreeSet;

use crate::base::{Label, VertexId};
use crate::graph::{GraphError, LabeledGraph};

pub fn parse_graph(text: &str) -> Result<LabeledGraph, GraphError> {
    let mut graph = LabeledGraph::new(BTreeSet::new());
    let mut declared_n: Option<u32> = None;
    let mut seen_header = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |msg: &str| GraphError::Parse {
            line: lineno + 1,
            msg: msg.to_string(),
        };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("graph") => {
                let n: u32 = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err("expected `graph <n> <N>`"))?;
                let bound: u32 = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err("expected `graph <n> <N>`"))?;
                declared_n = Some(n);
                graph.set_id_bound(bound);
                seen_header = true;
            }
            Some("alphabet") => {
                let rest = line["alphabet".len()..].trim();
                for sym in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    graph.add_alphabet_symbol(Label::sym(sym));
                }
            }
            Some("node") => {
                let id: u32 = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err("expected `node <id> [labels]`"))?;
                if id == 0 {
                    return Err(err("vertex ids are positive"));
                }
                graph.add_vertex(VertexId(id));
                if let Some(labels) = parts.next() {
                    let set: BTreeSet<Label> = labels
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(Label::sym)
                        .collect();
                    graph.set_labels(VertexId(id), set);
                }
            }
            Some("edge") => {
                let u: u32 = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err("expected `edge <u> <v>`"))?;
                let v: u32 = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err("expected `edge <u> <v>`"))?;
                if u == v {
                    return Err(err("self-loops are not allowed"));
                }
                graph.add_edge(VertexId(u), VertexId(v));
            }
            _ => return Err(err("unknown directive")),
        }
    }
    if !seen_header {
        return Err(GraphError::Parse {
            line: 0,
            msg: "missing `graph <n> <N>` header".into(),
        });
    }
    if let Some(n) = declared_n {
        if n as usize != graph.n() {
            return Err(GraphError::Parse {
                line: 0,
                msg: format!("header declares {n} nodes but {} were defined", graph.n()),
            });
        }
    }
    Ok(graph)
}

pub fn format_graph(graph: &LabeledGraph) -> String {
    let mut out = String::new();
    out.push_str(&format!("graph {} {}\n", graph.n(), graph.id_bound()));
    let syms: Vec<String> = graph
        .alphabet()
        .iter()
        .filter_map(|l| match l {
            Label::Sym(s) => Some(s.clone()),
            _ => None,
        })
        .collect();
    if !syms.is_empty() {
        out.push_str(&format!("alphabet {}\n", syms.join(",")));
    }
    for v in graph.vertices() {
        let labels: Vec<String> = graph
            .labels_of(v)
            .iter()
            .map(|l| l.to_string())
            .collect();
        if labels.is_empty() {
            out.push_str(&format!("node {v}\n"));
        } else {
            out.push_str(&format!("node {v} {}\n", labels.join(",")));
        }
    }
    for (u, v) in graph.edges() {
        out.push_str(&format!("edge {u} {v}\n"));
    }
    out
}

impl LabeledGraph {
    pub(crate) fn add_alphabet_symbol(&mut self, label: Label) {
        self.alphabet.insert(label);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::example_g1;

    #[test]
    fn round_trip() {
        let g = example_g1();
        let text = format_graph(&g);
        let g2 = parse_graph(&text).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_graph("nonsense 1 2").is_err());
        assert!(parse_graph("graph 1 1\nedge 1 1").is_err());
        assert!(parse_graph("node 1").is_err()); // missing header
    }

    #[test]
    fn comments_and_alphabet() {
        let text = "# a comment\ngraph 2 10\nalphabet a,b\nnode 1 a\nnode 2\nedge 1 2\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.id_bound(), 10);
        assert!(g.alphabet().contains(&Label::sym("b")));
        assert!(g.labels_of(VertexId(1)).contains(&Label::sym("a")));
    }
}
