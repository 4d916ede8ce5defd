//! Plain-text formats for graphs, colourings and labellings.
//!
//! Graphs use a DIMACS-like layout with 0-based vertex ids:
//!
//! ```text
//! c a path on three vertices
//! p edge 3 2
//! e 0 1
//! e 1 2
//! ```
//!
//! Colourings start with `colouring <p> <q> <n>` followed by `n` integers
//! in vertex order; labellings start with `labelling <p> <q> <m>` followed
//! by one `<u> <v> <value>` line per edge in canonical order. Lines starting
//! with `c` are comments in every format.

use std::fmt::Write as _;

use thiserror::Error;

use crate::circular::{CircularColouring, CircularParams};
use crate::graph::Graph;
use crate::labelling::EdgeLabelling;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    /// 1-based; 0 when the problem is the input as a whole.
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

/// Non-comment, non-blank lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.first() {
            None => None,
            Some(&"c") => None,
            Some(w) if w.starts_with('c') && *w != "colouring" => None,
            Some(_) => Some((i + 1, words)),
        }
    })
}

fn number(line: usize, word: &str) -> Result<usize, ParseError> {
    word.parse()
        .or_else(|_| err(line, format!("expected a non-negative integer, found {word:?}")))
}

pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (line, words) in content_lines(text) {
        match words.as_slice() {
            ["p", "edge", n, m] => {
                if header.is_some() {
                    return err(line, "second problem line");
                }
                header = Some((number(line, n)?, number(line, m)?));
            }
            ["e", u, v] => {
                let Some((n, _)) = header else {
                    return err(line, "edge before the problem line");
                };
                let (u, v) = (number(line, u)?, number(line, v)?);
                if u >= n || v >= n {
                    return err(line, format!("vertex out of range 0..{n}"));
                }
                if u == v {
                    return err(line, format!("self-loop at {u}"));
                }
                if !seen.insert((u.min(v), u.max(v))) {
                    return err(line, format!("duplicate edge {u} {v}"));
                }
                edges.push((u, v));
            }
            _ => return err(line, format!("unrecognised line {:?}", words.join(" "))),
        }
    }
    let Some((n, m)) = header else {
        return err(0, "missing problem line");
    };
    if edges.len() != m {
        return err(0, format!("problem line announces {m} edges, found {}", edges.len()));
    }
    Graph::new(n, edges).or_else(|e| err(0, e.to_string()))
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("p edge {} {}\n", g.vertex_count(), g.edge_count());
    for &(u, v) in g.edges() {
        writeln!(out, "e {u} {v}").expect("write to string");
    }
    out
}

pub fn parse_colouring(text: &str) -> Result<CircularColouring, ParseError> {
    let (params, colours) = parse_colouring_values(text)?;
    CircularColouring::new(params, colours).or_else(|e| err(0, e.to_string()))
}

/// The header parameters and raw colour values, without range checks.
pub fn parse_colouring_values(text: &str) -> Result<(CircularParams, Vec<usize>), ParseError> {
    let mut lines = content_lines(text);
    let Some((line, words)) = lines.next() else {
        return err(0, "missing colouring header");
    };
    let [kw, p, q, n] = words.as_slice() else {
        return err(line, "expected `colouring <p> <q> <n>`");
    };
    if *kw != "colouring" {
        return err(line, "expected `colouring <p> <q> <n>`");
    }
    let (p, q, n) = (number(line, p)?, number(line, q)?, number(line, n)?);
    let params = CircularParams::new(p, q).or_else(|e| err(line, e.to_string()))?;
    let mut colours = Vec::with_capacity(n);
    let mut last = line;
    for (line, words) in lines {
        last = line;
        for w in words {
            colours.push(number(line, w)?);
        }
    }
    if colours.len() != n {
        return err(last, format!("expected {n} colours, found {}", colours.len()));
    }
    Ok((params, colours))
}

pub fn write_colouring(c: &CircularColouring) -> String {
    let colours: Vec<String> = c.colours().iter().map(|x| x.to_string()).collect();
    format!(
        "colouring {} {} {}\n{}\n",
        c.params().p(),
        c.params().q(),
        c.len(),
        colours.join(" ")
    )
}

/// Reads a labelling of `g`; the edge lines must follow canonical order.
pub fn parse_labelling(g: &Graph, text: &str) -> Result<EdgeLabelling, ParseError> {
    let mut lines = content_lines(text);
    let Some((line, words)) = lines.next() else {
        return err(0, "missing labelling header");
    };
    let ["labelling", p, q, m] = words.as_slice() else {
        return err(line, "expected `labelling <p> <q> <m>`");
    };
    let (p, q, m) = (number(line, p)?, number(line, q)?, number(line, m)?);
    let params = CircularParams::new(p, q).or_else(|e| err(line, e.to_string()))?;
    if m != g.edge_count() {
        return err(line, format!("graph has {} edges, header says {m}", g.edge_count()));
    }
    let mut labels = Vec::with_capacity(m);
    for (line, words) in lines {
        let [u, v, value] = words.as_slice() else {
            return err(line, "expected `<u> <v> <value>`");
        };
        let (u, v, value) = (number(line, u)?, number(line, v)?, number(line, value)?);
        if labels.len() >= m || g.edge(labels.len()) != (u, v) {
            return err(line, format!("edge {u} {v} is not next in canonical order"));
        }
        labels.push(value);
    }
    if labels.len() != m {
        return err(0, format!("expected {m} labels, found {}", labels.len()));
    }
    EdgeLabelling::from_labels(params, labels).or_else(|e| err(0, e.to_string()))
}

pub fn write_labelling(g: &Graph, lab: &EdgeLabelling) -> String {
    let mut out = format!("labelling {} {} {}\n", lab.params().p(), lab.params().q(), g.edge_count());
    for (id, &(u, v)) in g.edges().iter().enumerate() {
        writeln!(out, "{u} {v} {}", lab.label(id)).expect("write to string");
    }
    out
}
