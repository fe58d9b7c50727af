//! Plain-text instance formats.
//!
//! Edge list: first line `n m`, then `m` lines `u v w` with 0-indexed
//! vertices and a decimal weight. Bipartite matrix: first line `nU nV`, then
//! `nU` rows of `nV` decimal weights. Blank lines and `#` comments are skipped.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::matching::BipartiteWeights;
use crate::graph::multigraph::{WeightVector, WeightedMultigraph};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_field<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad {what} `{tok}`"),
    })
}

pub fn parse_edge_list(text: &str) -> Result<(WeightedMultigraph, WeightVector)> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty input".into(),
    })?;
    let mut it = header.split_whitespace();
    let n: usize = parse_field(ln, it.next(), "vertex count")?;
    let m: usize = parse_field(ln, it.next(), "edge count")?;
    let mut endpoints = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, line) = lines.next().ok_or(Error::Parse {
            line: ln,
            msg: format!("expected {m} edges, found {}", endpoints.len()),
        })?;
        let mut it = line.split_whitespace();
        let u: usize = parse_field(ln, it.next(), "endpoint")?;
        let v: usize = parse_field(ln, it.next(), "endpoint")?;
        let w: f64 = parse_field(ln, it.next(), "weight")?;
        if u >= n || v >= n {
            return Err(Error::Parse {
                line: ln,
                msg: format!("endpoint out of range for n = {n}"),
            });
        }
        endpoints.push((u, v));
        weights.push(w);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(Error::Parse {
            line: ln,
            msg: "trailing data after edge list".into(),
        });
    }
    let g = WeightedMultigraph::new(n, &endpoints)?;
    let w = WeightVector::new(weights)?;
    Ok((g, w))
}

pub fn write_edge_list(g: &WeightedMultigraph, w: &WeightVector) -> String {
    let mut out = format!("{} {}\n", g.vertex_count(), g.edge_count());
    for e in g.edges() {
        let _ = writeln!(out, "{} {} {}", e.u, e.v, w[e.id]);
    }
    out
}

pub fn parse_bipartite(text: &str) -> Result<BipartiteWeights> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty input".into(),
    })?;
    let mut it = header.split_whitespace();
    let rows: usize = parse_field(ln, it.next(), "row count")?;
    let cols: usize = parse_field(ln, it.next(), "column count")?;
    let mut data = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let (ln, line) = lines.next().ok_or(Error::Parse {
            line: ln,
            msg: format!("expected {rows} rows, found {r}"),
        })?;
        let before = data.len();
        for tok in line.split_whitespace() {
            data.push(parse_field::<f64>(ln, Some(tok), "weight")?);
        }
        if data.len() - before != cols {
            return Err(Error::Parse {
                line: ln,
                msg: format!("expected {cols} weights, found {}", data.len() - before),
            });
        }
    }
    BipartiteWeights::new(rows, cols, data)
}

pub fn write_bipartite(w: &BipartiteWeights) -> String {
    let mut out = format!("{} {}\n", w.rows(), w.cols());
    for i in 0..w.rows() {
        let row: Vec<String> = w.row(i).iter().map(|x| x.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
