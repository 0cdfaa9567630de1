//! Plain-text edge-list format.
//!
//! ```text
//! # comment
//! n m [embedded]
//! u v            (m lines)
//! v: w1 w2 ...   (n lines, only when embedded; clockwise rotation at v)
//! w v p/q        (optional vertex weights)
//! ```

use std::fmt::Write as _;

use num_bigint::BigInt;

use super::{Embedding, Graph, GraphError, Ratio, WeightFunction};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = match line.find('#') {
            Some(p) => &line[..p],
            None => line,
        };
        let line = line.trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn malformed(line: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Malformed { line, msg: msg.into() }
}

fn parse_id(line: usize, tok: &str) -> Result<usize, GraphError> {
    tok.parse().map_err(|_| malformed(line, format!("expected vertex id, found {tok:?}")))
}

pub fn parse_ratio(tok: &str) -> Option<Ratio> {
    match tok.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q == BigInt::from(0) {
                return None;
            }
            Some(Ratio::new(p, q))
        }
        None => Some(Ratio::from_integer(tok.trim().parse().ok()?)),
    }
}

/// Parses a graph file, ignoring any weight section.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    parse_weighted_graph(text).map(|(g, _)| g)
}

/// Parses a graph file together with its optional weight section. Vertices
/// without a weight line get weight 0 when any weight is present.
pub fn parse_weighted_graph(text: &str) -> Result<(Graph, Option<WeightFunction>), GraphError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| malformed(1, "missing header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() < 2 || toks.len() > 3 {
        return Err(malformed(hl, "header must be \"n m [embedded]\""));
    }
    let n: usize = toks[0].parse().map_err(|_| malformed(hl, "bad vertex count"))?;
    let m: usize = toks[1].parse().map_err(|_| malformed(hl, "bad edge count"))?;
    let embedded = match toks.get(2) {
        None => false,
        Some(&"embedded") => true,
        Some(other) => return Err(malformed(hl, format!("unknown header flag {other:?}"))),
    };

    let mut g = Graph::new(n);
    for _ in 0..m {
        let (ln, line) = lines.next().ok_or_else(|| malformed(hl, format!("expected {m} edge lines")))?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(malformed(ln, "edge line must be \"u v\""));
        }
        let (u, v) = (parse_id(ln, parts[0])?, parse_id(ln, parts[1])?);
        g.add_edge(u, v)?;
    }

    let mut rest: Vec<(usize, &str)> = lines.collect();
    if embedded {
        if rest.len() < n {
            return Err(malformed(hl, format!("expected {n} rotation lines")));
        }
        let mut rotation: Vec<Option<Vec<usize>>> = vec![None; n];
        for &(ln, line) in &rest[..n] {
            let (head, tail) = line.split_once(':').ok_or_else(|| malformed(ln, "rotation line must be \"v: w1 w2 ...\""))?;
            let v = parse_id(ln, head.trim())?;
            if v >= n {
                return Err(GraphError::OutOfRange { vertex: v, n });
            }
            if rotation[v].is_some() {
                return Err(GraphError::InvalidRotation(format!("rotation for {v} given twice")));
            }
            let rot = tail.split_whitespace().map(|t| parse_id(ln, t)).collect::<Result<Vec<_>, _>>()?;
            rotation[v] = Some(rot);
        }
        let rotation = rotation.into_iter().map(|r| r.unwrap_or_default()).collect();
        g.set_embedding(Embedding::new(rotation))?;
        rest.drain(..n);
    }

    let mut weights: Option<Vec<Ratio>> = None;
    for (ln, line) in rest {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 || parts[0] != "w" {
            return Err(malformed(ln, "unexpected trailing line"));
        }
        let v = parse_id(ln, parts[1])?;
        if v >= n {
            return Err(GraphError::OutOfRange { vertex: v, n });
        }
        let w = parse_ratio(parts[2]).ok_or_else(|| malformed(ln, "weight must be p/q"))?;
        weights.get_or_insert_with(|| vec![Ratio::from_integer(0.into()); n])[v] = w;
    }
    let weights = weights.map(WeightFunction::new).transpose()?;
    Ok((g, weights))
}

pub fn write_graph(g: &Graph) -> String {
    write_weighted_graph(g, None)
}

pub fn write_weighted_graph(g: &Graph, weights: Option<&WeightFunction>) -> String {
    let mut out = String::new();
    let flag = if g.embedding().is_some() { " embedded" } else { "" };
    writeln!(out, "{} {}{}", g.n(), g.m(), flag).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    if let Some(emb) = g.embedding() {
        for v in 0..g.n() {
            let rot: Vec<String> = emb.rotation(v).iter().map(usize::to_string).collect();
            writeln!(out, "{v}: {}", rot.join(" ")).unwrap();
        }
    }
    if let Some(w) = weights {
        for (v, x) in w.as_slice().iter().enumerate() {
            writeln!(out, "w {v} {}/{}", x.numer(), x.denom()).unwrap();
        }
    }
    out
}
