//! Text formats for point sets, triangulations and flip sequences.
//!
//! Rationals are written `p/q` (`q` omitted when 1), a point as `x y`.
//! Point-set files start with the point count, triangulation files with the
//! edge count; flip sequences have one `remove a b insert c d` line per flip.
//! Blank lines and `#` comments are skipped when reading.

use crate::geometry::{Point, Rational};
use crate::pointset::{PointSet, PointSetError};
use crate::search::FlipGraph;
use crate::triangulation::{Edge, FlipSequence, FlipStep, Triangulation, TriangulationError};
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    PointSet(#[from] PointSetError),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
}

pub(crate) struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)> + 'a> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
                .filter(|(_, l)| !l.is_empty()),
        );
        Lines {
            inner: it.peekable(),
            last: 0,
        }
    }

    pub(crate) fn err(&self, m: impl Into<String>) -> FormatError {
        FormatError::Parse {
            line: self.last,
            message: m.into(),
        }
    }

    pub(crate) fn next_line(&mut self) -> Result<Vec<&'a str>, FormatError> {
        let (no, l) = self.inner.next().ok_or_else(|| self.err("unexpected end of input"))?;
        self.last = no;
        Ok(l.split_whitespace().collect())
    }

    pub(crate) fn is_done(&mut self) -> bool {
        self.inner.peek().is_none()
    }

    /// A line starting with `key`, returning the remaining tokens.
    pub(crate) fn keyed(&mut self, key: &str) -> Result<Vec<&'a str>, FormatError> {
        let t = self.next_line()?;
        if t.first() != Some(&key) {
            return Err(self.err(format!("expected `{key}`")));
        }
        Ok(t[1..].to_vec())
    }

    pub(crate) fn parse<T: FromStr>(&self, tok: &str) -> Result<T, FormatError> {
        tok.parse().map_err(|_| self.err(format!("cannot parse {tok:?}")))
    }

    pub(crate) fn count(&mut self, key: &str) -> Result<usize, FormatError> {
        let t = self.keyed(key)?;
        match t.as_slice() {
            [k] => self.parse(k),
            _ => Err(self.err(format!("expected `{key} <count>`"))),
        }
    }

    /// A line holding a single count.
    pub(crate) fn header(&mut self) -> Result<usize, FormatError> {
        let t = self.next_line()?;
        match t.as_slice() {
            [k] => self.parse(k),
            _ => Err(self.err("expected a count")),
        }
    }

    pub(crate) fn list(&mut self, key: &str) -> Result<Vec<usize>, FormatError> {
        let t = self.keyed(key)?;
        self.usizes(&t)
    }

    pub(crate) fn usizes(&self, toks: &[&str]) -> Result<Vec<usize>, FormatError> {
        toks.iter().map(|t| self.parse(t)).collect()
    }

    pub(crate) fn point(&self, t: &[&str]) -> Result<Point, FormatError> {
        if t.len() != 2 {
            return Err(self.err("expected two coordinates"));
        }
        Ok(Point::new(self.parse::<Rational>(t[0])?, self.parse::<Rational>(t[1])?))
    }

    pub(crate) fn edge(&self, t: &[&str]) -> Result<Edge, FormatError> {
        let v = self.usizes(t)?;
        if v.len() != 2 || v[0] == v[1] {
            return Err(self.err("expected two distinct point indices"));
        }
        Ok(Edge::new(v[0], v[1]))
    }

    pub(crate) fn expect_end(&mut self) -> Result<(), FormatError> {
        if self.is_done() {
            Ok(())
        } else {
            self.next_line()?;
            Err(self.err("trailing content"))
        }
    }
}

pub(crate) fn point_lines(s: &mut String, points: &[Point]) {
    for p in points {
        let _ = writeln!(s, "{} {}", p.x, p.y);
    }
}

pub(crate) fn edge_lines(s: &mut String, edges: &[Edge]) {
    for e in edges {
        let _ = writeln!(s, "{} {}", e.a, e.b);
    }
}

pub fn serialize_points(points: &[Point]) -> String {
    let mut s = format!("{}\n", points.len());
    point_lines(&mut s, points);
    s
}

pub fn serialize_point_set(ps: &PointSet) -> String {
    serialize_points(ps.points())
}

/// Reads the points without any geometric check.
pub fn parse_points(text: &str) -> Result<Vec<Point>, FormatError> {
    let mut l = Lines::new(text);
    let n = l.header()?;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let t = l.next_line()?;
        out.push(l.point(&t)?);
    }
    l.expect_end()?;
    Ok(out)
}

/// Reads and checks a point set (distinct points, no three collinear).
pub fn parse_point_set(text: &str) -> Result<PointSet, FormatError> {
    Ok(PointSet::new(parse_points(text)?)?)
}

/// Edges sorted, so equal triangulations serialize identically.
pub fn serialize_triangulation(t: &Triangulation) -> String {
    serialize_edges(&t.edges_sorted())
}

pub fn serialize_edges(edges: &[Edge]) -> String {
    let mut s = format!("{}\n", edges.len());
    edge_lines(&mut s, edges);
    s
}

pub fn parse_edges(text: &str) -> Result<Vec<Edge>, FormatError> {
    let mut l = Lines::new(text);
    let k = l.header()?;
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let t = l.next_line()?;
        out.push(l.edge(&t)?);
    }
    l.expect_end()?;
    Ok(out)
}

/// Reads an edge list and validates it as a triangulation of `ps`.
pub fn parse_triangulation(text: &str, ps: Arc<PointSet>) -> Result<Triangulation, FormatError> {
    Ok(Triangulation::from_edges(ps, parse_edges(text)?)?)
}

pub fn serialize_sequence(seq: &FlipSequence) -> String {
    let mut s = String::new();
    for f in &seq.steps {
        let _ = writeln!(
            s,
            "remove {} {} insert {} {}",
            f.removed.a, f.removed.b, f.inserted.a, f.inserted.b
        );
    }
    s
}

/// Only the syntax is checked; replay against a triangulation validates the flips.
pub fn parse_sequence(text: &str) -> Result<FlipSequence, FormatError> {
    let mut l = Lines::new(text);
    let mut out = Vec::new();
    while !l.is_done() {
        let t = l.next_line()?;
        if t.len() != 6 || t[0] != "remove" || t[3] != "insert" {
            return Err(l.err("expected `remove a b insert c d`"));
        }
        out.push(FlipStep {
            removed: l.edge(&t[1..3])?,
            inserted: l.edge(&t[4..6])?,
        });
    }
    Ok(FlipSequence::new(out))
}

/// Node table (`i` followed by the node's sorted edges as index pairs),
/// then one `u v` line per flip-graph edge; both parts start with a count.
pub fn serialize_flip_graph(g: &FlipGraph) -> String {
    let mut s = format!("{}\n", g.node_payloads.len());
    for (i, edges) in g.node_payloads.iter().enumerate() {
        let _ = write!(s, "{i}");
        for e in edges {
            let _ = write!(s, " {} {}", e.a, e.b);
        }
        s.push('\n');
    }
    let _ = writeln!(s, "{}", g.adjacency.len());
    for (u, v) in &g.adjacency {
        let _ = writeln!(s, "{u} {v}");
    }
    s
}
