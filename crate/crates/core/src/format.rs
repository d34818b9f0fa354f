//! Line-oriented text format for colored bipartite graphs.
//!
//! ```text
//! # comment
//! n q
//! alpha_1 ... alpha_q      (optional)
//! a b c                    (one edge per line, 1 <= c <= q)
//! ```
//!
//! Edges are written sorted by `(a, b)`, and the alpha line is written with
//! shortest round-trip float formatting, so `parse(serialize(g)) == g`.

use std::fmt::Write as _;

use crate::graph::{ColorSpec, ColoredBipartiteGraph, GraphError};

pub fn serialize_graph(g: &ColoredBipartiteGraph) -> String {
    let mut out = String::with_capacity(16 + g.edge_count() * 12);
    writeln!(out, "{} {}", g.n(), g.q()).unwrap();
    if let Some(alphas) = g.alphas() {
        let line = alphas.iter().map(f64::to_string).collect::<Vec<_>>().join(" ");
        writeln!(out, "{line}").unwrap();
    }
    for e in g.edges() {
        writeln!(out, "{} {} {}", e.a, e.b, e.color).unwrap();
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_graph(text: &str) -> Result<ColoredBipartiteGraph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line_no, header) = lines.next().ok_or_else(|| parse_err(1, "missing `n q` header"))?;
    let header: Vec<&str> = header.split_whitespace().collect();
    let [n, q] = header[..] else {
        return Err(parse_err(line_no, "header must be `n q`"));
    };
    let n: usize = n.parse().map_err(|e| parse_err(line_no, format!("bad n: {e}")))?;
    let q: usize = q.parse().map_err(|e| parse_err(line_no, format!("bad q: {e}")))?;

    let mut alphas = None;
    let mut edges = Vec::new();
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        // Only the alpha line can contain a real, and it must precede every
        // edge. A lone `1` is the alpha line of a single-color graph.
        let looks_real = fields.iter().any(|f| f.contains(['.', 'e', 'E']));
        if edges.is_empty() && alphas.is_none() && (looks_real || fields.len() != 3) {
            if fields.len() != q {
                return Err(parse_err(line_no, format!("expected {q} probabilities, found {}", fields.len())));
            }
            let values = fields
                .iter()
                .map(|f| f.parse::<f64>().map_err(|e| parse_err(line_no, format!("bad alpha {f:?}: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            alphas = Some(ColorSpec::new(values).map_err(|e| parse_err(line_no, e.to_string()))?);
            continue;
        }
        let [a, b, c] = fields[..] else {
            return Err(parse_err(line_no, "edge line must be `a b c`"));
        };
        let parse = |f: &str, what: &str| f.parse::<usize>().map_err(|e| parse_err(line_no, format!("bad {what} {f:?}: {e}")));
        edges.push((parse(a, "a")?, parse(b, "b")?, parse(c, "color")?));
    }

    let g = ColoredBipartiteGraph::new(n, q, edges)?;
    match alphas {
        Some(spec) => g.with_alphas(&spec),
        None => Ok(g),
    }
}
