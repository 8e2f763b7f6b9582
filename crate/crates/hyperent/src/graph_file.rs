//! Plain-text hypergraph files.
//!
//! ```text
//! n 3
//! # comments and blank lines are ignored
//! 0 1 2
//! ```
//!
//! The first non-comment line is `n <N>`; every later line is one edge given as
//! space-separated vertex indices.

use std::fs;
use std::path::Path;

use hyperent_core::Hypergraph;

use crate::error::{CliError, CliResult};

fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Parses a graph file; errors carry the 1-based line number.
pub fn parse_graph(text: &str) -> Result<Hypergraph, (usize, String)> {
    let mut lines = significant_lines(text);
    let (header_line, header) = lines
        .next()
        .ok_or((1, "missing `n <N>` header".to_string()))?;
    let mut fields = header.split_whitespace();
    let n = match (fields.next(), fields.next(), fields.next()) {
        (Some("n"), Some(v), None) => v
            .parse::<u32>()
            .map_err(|e| (header_line, format!("bad qubit count {v:?}: {e}")))?,
        _ => return Err((header_line, format!("expected `n <N>`, found {header:?}"))),
    };
    let mut edges = Vec::new();
    for (line, l) in lines {
        let edge = l
            .split_whitespace()
            .map(|v| {
                v.parse::<u32>()
                    .map_err(|e| (line, format!("bad vertex {v:?}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        hyperent_core::Edge::new(&edge, n).map_err(|e| (line, e.to_string()))?;
        edges.push(edge);
    }
    Hypergraph::new(n, &edges).map_err(|e| (header_line, e.to_string()))
}

pub fn read_graph(path: &Path) -> CliResult<Hypergraph> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: 0,
        message: e.to_string(),
    })?;
    parse_graph(&text).map_err(|(line, message)| CliError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    })
}

pub fn format_graph(h: &Hypergraph) -> String {
    let mut out = format!("n {}\n", h.n_qubits());
    for e in h.edges() {
        out.push_str(&e.to_string());
        out.push('\n');
    }
    out
}
