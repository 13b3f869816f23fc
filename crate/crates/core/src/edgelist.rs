//! Plain-text edge lists.
//!
//! ```text
//! n m
//! u v      (m lines, 0 <= u < v < n)
//! ```
//!
//! ASCII, one record per line, every line newline-terminated.

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Error)]
pub enum EdgeListError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
    #[error("header declares {declared} edges but {found} were listed")]
    CountMismatch { declared: usize, found: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize), EdgeListError> {
    let mut it = line.split_ascii_whitespace();
    let mut next = |what: &str| -> Result<usize, EdgeListError> {
        let tok = it.next().ok_or_else(|| EdgeListError::Parse {
            line: lineno,
            msg: format!("missing {what}"),
        })?;
        tok.parse().map_err(|_| EdgeListError::Parse {
            line: lineno,
            msg: format!("invalid {what} {tok:?}"),
        })
    };
    let a = next("first field")?;
    let b = next("second field")?;
    if it.next().is_some() {
        return Err(EdgeListError::Parse {
            line: lineno,
            msg: "trailing fields".into(),
        });
    }
    Ok((a, b))
}

/// Parses an edge list, rejecting duplicates, loops, out-of-range and
/// unordered (`u > v`) pairs.
pub fn parse(text: &str) -> Result<Graph, EdgeListError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or(EdgeListError::Parse {
        line: 1,
        msg: "empty input".into(),
    })?;
    let (n, m) = parse_pair(header, 1)?;
    let mut g = Graph::new(n).map_err(|source| EdgeListError::Graph { line: 1, source })?;
    let mut found = 0;
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let (u, v) = parse_pair(line, lineno)?;
        let err = |source| EdgeListError::Graph { line: lineno, source };
        if u >= n || v >= n {
            return Err(err(GraphError::OutOfRange { u, v, n }));
        }
        if u == v {
            return Err(err(GraphError::SelfLoop(u)));
        }
        if u > v {
            return Err(EdgeListError::Parse {
                line: lineno,
                msg: format!("pair {u} {v} is not ordered u < v"),
            });
        }
        if !g.insert_edge(u, v) {
            return Err(err(GraphError::Duplicate(u, v)));
        }
        found += 1;
    }
    if found != m {
        return Err(EdgeListError::CountMismatch { declared: m, found });
    }
    Ok(g)
}

/// Serializes `g` with edges in lexicographic order.
pub fn to_string(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn read(path: impl AsRef<Path>) -> Result<Graph, EdgeListError> {
    parse(&fs::read_to_string(path)?)
}

pub fn write(path: impl AsRef<Path>, g: &Graph) -> Result<(), EdgeListError> {
    fs::write(path, to_string(g))?;
    Ok(())
}
