//! Simple cubic graphs, their text format, and the exact vertex-cover oracle.

use super::ReductionError;
use rustc_hash::FxHashSet;
use std::fmt;
use std::str::FromStr;

/// Simple 3-regular graph on vertices `0..n`; edges keep their input order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CubicGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl CubicGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, ReductionError> {
        let bad = |m: String| Err(ReductionError::NotCubic(m));
        let mut seen = FxHashSet::default();
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return bad(format!("edge ({u}, {v}) has an endpoint outside 0..{n}"));
            }
            if u == v {
                return bad(format!("loop at {u}"));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return bad(format!("repeated edge ({u}, {v})"));
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        if let Some(v) = (0..n).find(|&v| degree[v] != 3) {
            return bad(format!("vertex {v} has degree {}", degree[v]));
        }
        if 2 * edges.len() != 3 * n {
            return bad(format!("m = {} but 3n/2 = {}", edges.len(), 3 * n / 2));
        }
        Ok(CubicGraph { n, edges })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Indices of the edges incident to `v`, in input order.
    pub fn incident(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&i| self.edges[i].0 == v || self.edges[i].1 == v)
            .collect()
    }

    pub fn is_cover(&self, cover: &[usize]) -> bool {
        self.uncovered_edge(cover).is_none()
    }

    /// First edge with no endpoint in `cover`.
    pub fn uncovered_edge(&self, cover: &[usize]) -> Option<(usize, usize)> {
        let set: FxHashSet<usize> = cover.iter().copied().collect();
        self.edges
            .iter()
            .copied()
            .find(|(u, v)| !set.contains(u) && !set.contains(v))
    }

    pub fn complete4() -> Self {
        CubicGraph::new(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    /// Outer 5-cycle `0..5`, inner pentagram `5..10`, spokes `i - (i+5)`.
    pub fn petersen() -> Self {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
        }
        for i in 0..5 {
            e.push((i, i + 5));
        }
        for i in 0..5 {
            e.push((5 + i, 5 + (i + 2) % 5));
        }
        CubicGraph::new(10, e).unwrap()
    }

    pub fn k33() -> Self {
        let mut e = Vec::new();
        for a in 0..3 {
            for b in 3..6 {
                e.push((a, b));
            }
        }
        CubicGraph::new(6, e).unwrap()
    }

    /// The 3-dimensional cube graph on `0..8` (bit-flip neighbours).
    pub fn cube() -> Self {
        let mut e = Vec::new();
        for v in 0..8usize {
            for bit in [1, 2, 4] {
                if v & bit == 0 {
                    e.push((v, v | bit));
                }
            }
        }
        CubicGraph::new(8, e).unwrap()
    }

    /// Stable 64-bit FNV-1a hash of the text form, used as a cache key.
    pub fn stable_hash(&self) -> u64 {
        let mut h = Fnv::new();
        h.write(self.to_string().as_bytes());
        h.finish()
    }
}

/// 64-bit FNV-1a; stable across runs and platforms, unlike the std hasher.
pub(crate) struct Fnv(u64);

impl Fnv {
    pub(crate) fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    pub(crate) fn write(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 ^= u64::from(*b);
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }

    pub(crate) fn write_u64(&mut self, v: u64) {
        self.write(&v.to_le_bytes());
    }

    pub(crate) fn finish(&self) -> u64 {
        self.0
    }
}

impl fmt::Display for CubicGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n, self.edges.len())?;
        for (u, v) in &self.edges {
            writeln!(f, "{u} {v}")?;
        }
        Ok(())
    }
}

impl FromStr for CubicGraph {
    type Err = ReductionError;

    /// `n m` on the first line, then `m` lines `u v`. Blank lines and `#`
    /// comments are skipped.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let parse_pair = |no: usize, l: &str| -> Result<(usize, usize), ReductionError> {
            let parts: Vec<&str> = l.split_whitespace().collect();
            let num = |t: &str| {
                t.parse::<usize>()
                    .map_err(|_| ReductionError::Parse { line: no, message: format!("not an integer: {t:?}") })
            };
            if parts.len() != 2 {
                return Err(ReductionError::Parse { line: no, message: "expected two integers".into() });
            }
            Ok((num(parts[0])?, num(parts[1])?))
        };
        let (no, head) = lines
            .next()
            .ok_or(ReductionError::Parse { line: 1, message: "empty graph file".into() })?;
        let (n, m) = parse_pair(no, head)?;
        let mut edges = Vec::with_capacity(m);
        for (no, l) in lines.by_ref() {
            edges.push(parse_pair(no, l)?);
        }
        if edges.len() != m {
            return Err(ReductionError::Parse {
                line: 1,
                message: format!("header announces {m} edges, found {}", edges.len()),
            });
        }
        CubicGraph::new(n, edges)
    }
}

/// Minimum vertex cover size by branching on an uncovered edge (either
/// endpoint joins the cover), pruned by the best size found so far.
pub fn min_vertex_cover_bruteforce(g: &CubicGraph) -> Result<usize, ReductionError> {
    Ok(min_vertex_cover(g)?.len())
}

/// A minimum vertex cover (sorted); ties go to the branch taking the smaller endpoint.
pub fn min_vertex_cover(g: &CubicGraph) -> Result<Vec<usize>, ReductionError> {
    if g.vertex_count() > 20 {
        return Err(ReductionError::TooLarge(g.vertex_count()));
    }
    let n = g.vertex_count();
    let mut best: Vec<usize> = (0..n).collect();
    let mut chosen = vec![false; n];
    let mut current = Vec::new();
    branch(g, &mut chosen, &mut current, &mut best);
    best.sort_unstable();
    Ok(best)
}

fn branch(g: &CubicGraph, chosen: &mut [bool], current: &mut Vec<usize>, best: &mut Vec<usize>) {
    if current.len() >= best.len() {
        return;
    }
    let Some(&(u, v)) = g.edges().iter().find(|(u, v)| !chosen[*u] && !chosen[*v]) else {
        *best = current.clone();
        return;
    };
    for x in [u.min(v), u.max(v)] {
        chosen[x] = true;
        current.push(x);
        branch(g, chosen, current, best);
        current.pop();
        chosen[x] = false;
    }
}
