//! Plain-text file formats.
//!
//! * graph: `n m` then `m` lines `u v` (0-based)
//! * bipartition: `n` lines of `U` or `V`
//! * lists: one line per edge, `edge_id k c1 .. ck`, colors ascending
//! * coloring: one line per colored edge, `edge_id color`
//! * edge values: one line per edge, `edge_id value` (eta or lambda)
//! * tokens: one line per node, `node_id tokens alpha`
//!
//! Blank lines and lines starting with `#` are skipped.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::exact::{q20, Real};
use crate::graph::{Bipartition, Graph, Side};
use crate::lists::{Color, ListAssignment, PartialColoring};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Non-empty, non-comment lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn field<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad {what} {tok:?}")))
}

pub fn read_graph(text: &str) -> Result<Graph> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let mut it = header.split_whitespace();
    let n: usize = field(hl, it.next(), "node count")?;
    let m: usize = field(hl, it.next(), "edge count")?;
    let mut edges = Vec::with_capacity(m);
    for (ln, l) in lines {
        let mut it = l.split_whitespace();
        let u: usize = field(ln, it.next(), "endpoint")?;
        let v: usize = field(ln, it.next(), "endpoint")?;
        if u >= n || v >= n {
            return Err(parse_err(ln, format!("endpoint out of range 0..{n}")));
        }
        if edges.len() == m {
            return Err(parse_err(ln, format!("more than the declared {m} edges")));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(parse_err(hl, format!("declared {m} edges, found {}", edges.len())));
    }
    Graph::new(n, edges).map_err(|e| parse_err(hl, e.to_string()))
}

pub fn write_graph(g: &Graph) -> String {
    let mut s = format!("{} {}\n", g.node_count(), g.edge_count());
    for &(u, v) in g.edges() {
        let _ = writeln!(s, "{u} {v}");
    }
    s
}

pub fn read_bipartition(g: &Graph, text: &str) -> Result<Bipartition> {
    let mut sides = Vec::new();
    for (ln, l) in content_lines(text) {
        sides.push(match l {
            "U" | "u" => Side::U,
            "V" | "v" => Side::V,
            _ => return Err(parse_err(ln, format!("expected U or V, got {l:?}"))),
        });
    }
    Bipartition::new(g, sides)
}

pub fn write_bipartition(b: &Bipartition) -> String {
    b.sides()
        .iter()
        .map(|s| if *s == Side::U { "U\n" } else { "V\n" })
        .collect()
}

/// Every edge of `g` must have exactly one line. The color space is the
/// tight range unless `space` is given.
pub fn read_lists(g: &Graph, text: &str, space: Option<(Color, Color)>) -> Result<ListAssignment> {
    let m = g.edge_count();
    let mut lists: Vec<Option<Vec<Color>>> = vec![None; m];
    for (ln, l) in content_lines(text) {
        let mut it = l.split_whitespace();
        let e: usize = field(ln, it.next(), "edge id")?;
        if e >= m {
            return Err(parse_err(ln, format!("edge id {e} out of range 0..{m}")));
        }
        let k: usize = field(ln, it.next(), "list length")?;
        let colors = it
            .map(|t| field::<Color>(ln, Some(t), "color"))
            .collect::<Result<Vec<_>>>()?;
        if colors.len() != k {
            return Err(parse_err(ln, format!("declared {k} colors, found {}", colors.len())));
        }
        if colors.windows(2).any(|w| w[0] >= w[1]) {
            return Err(parse_err(ln, "colors must be strictly ascending"));
        }
        if lists[e].replace(colors).is_some() {
            return Err(parse_err(ln, format!("duplicate list for edge {e}")));
        }
    }
    let lists = lists
        .into_iter()
        .enumerate()
        .map(|(e, l)| l.ok_or_else(|| parse_err(0, format!("no list for edge {e}"))))
        .collect::<Result<Vec<_>>>()?;
    match space {
        Some((lo, hi)) => ListAssignment::new(lo, hi, lists),
        None => ListAssignment::tight(lists),
    }
}

pub fn write_lists(lists: &ListAssignment) -> String {
    let mut s = String::new();
    for (e, l) in lists.lists().iter().enumerate() {
        let _ = write!(s, "{e} {}", l.len());
        for c in l {
            let _ = write!(s, " {c}");
        }
        s.push('\n');
    }
    s
}

pub fn read_coloring(m: usize, text: &str) -> Result<PartialColoring> {
    let mut out = vec![None; m];
    for (ln, l) in content_lines(text) {
        let mut it = l.split_whitespace();
        let e: usize = field(ln, it.next(), "edge id")?;
        let c: Color = field(ln, it.next(), "color")?;
        if e >= m {
            return Err(parse_err(ln, format!("edge id {e} out of range 0..{m}")));
        }
        if out[e].replace(c).is_some() {
            return Err(parse_err(ln, format!("duplicate edge id {e}")));
        }
    }
    Ok(out)
}

pub fn write_coloring(coloring: &[Option<Color>]) -> String {
    let mut s = String::new();
    for (e, c) in coloring.iter().enumerate() {
        if let Some(c) = c {
            let _ = writeln!(s, "{e} {c}");
        }
    }
    s
}

/// Per-edge real values, rounded to the crate's fixed precision.
pub fn read_edge_values(m: usize, text: &str) -> Result<Vec<Real>> {
    let mut out: Vec<Option<Real>> = vec![None; m];
    for (ln, l) in content_lines(text) {
        let mut it = l.split_whitespace();
        let e: usize = field(ln, it.next(), "edge id")?;
        let x: f64 = field(ln, it.next(), "value")?;
        if e >= m {
            return Err(parse_err(ln, format!("edge id {e} out of range 0..{m}")));
        }
        if !x.is_finite() {
            return Err(parse_err(ln, "value must be finite"));
        }
        if out[e].replace(q20(x)).is_some() {
            return Err(parse_err(ln, format!("duplicate edge id {e}")));
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(e, v)| v.ok_or_else(|| parse_err(0, format!("no value for edge {e}"))))
        .collect()
}

/// `(tokens, alpha)` per node.
pub fn read_tokens(n: usize, text: &str) -> Result<(Vec<usize>, Vec<Real>)> {
    let mut tokens = vec![None; n];
    let mut alpha = vec![q20(1.0); n];
    for (ln, l) in content_lines(text) {
        let mut it = l.split_whitespace();
        let v: usize = field(ln, it.next(), "node id")?;
        let t: usize = field(ln, it.next(), "token count")?;
        let a: f64 = field(ln, it.next(), "alpha")?;
        if v >= n {
            return Err(parse_err(ln, format!("node id {v} out of range 0..{n}")));
        }
        if !(a.is_finite() && a >= 1.0) {
            return Err(parse_err(ln, "alpha must be >= 1"));
        }
        if tokens[v].replace(t).is_some() {
            return Err(parse_err(ln, format!("duplicate node id {v}")));
        }
        alpha[v] = q20(a);
    }
    Ok((tokens.into_iter().map(|t| t.unwrap_or(0)).collect(), alpha))
}
