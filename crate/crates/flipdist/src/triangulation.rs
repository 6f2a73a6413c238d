//! Triangulations as edge sets with incrementally maintained triangle
//! adjacency, flip legality and application, validation, unavoidable edges,
//! deterministic completion and canonical keys.

use crate::geometry::Orientation;
use crate::pointset::PointSet;
use num_bigint::{BigInt, Sign};
use num_traits::{Signed, Zero};
use rustc_hash::{FxHashMap, FxHashSet};
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Unordered pair of point indices, normalized so that `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
}

impl Edge {
    /// Normalizing constructor. Panics on a loop, which is always a caller bug.
    pub fn new(p: usize, q: usize) -> Self {
        assert_ne!(p, q, "edge endpoints must differ");
        if p < q {
            Edge { a: p, b: q }
        } else {
            Edge { a: q, b: p }
        }
    }

    pub fn has(&self, v: usize) -> bool {
        self.a == v || self.b == v
    }

    pub fn other(&self, v: usize) -> usize {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.a, self.b)
    }
}

/// One flip: `removed` is replaced by `inserted`, the other diagonal of the
/// quadrilateral formed by the two triangles incident to `removed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlipStep {
    pub removed: Edge,
    pub inserted: Edge,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlipSequence {
    pub steps: Vec<FlipStep>,
}

impl FlipSequence {
    pub fn new(steps: Vec<FlipStep>) -> Self {
        FlipSequence { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The sequence undoing this one.
    pub fn reversed(&self) -> FlipSequence {
        FlipSequence {
            steps: self
                .steps
                .iter()
                .rev()
                .map(|s| FlipStep {
                    removed: s.inserted,
                    inserted: s.removed,
                })
                .collect(),
        }
    }

    /// Replays the sequence from `start`, checking every step.
    pub fn replay(&self, start: &Triangulation) -> Result<Triangulation, TriangulationError> {
        let mut t = start.clone();
        for (i, s) in self.steps.iter().enumerate() {
            t.apply_step_in_place(i, s)?;
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    IndexOutOfRange(usize),
    Crossing(Edge, Edge),
    EdgeCount { expected: usize, found: usize },
    /// Local structure around a vertex is not that of a triangulation.
    BadVertex(usize),
    /// A hull edge of the point set is missing.
    MissingHullEdge(Edge),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IndexOutOfRange(i) => write!(f, "index {i} out of range"),
            Violation::Crossing(e, g) => write!(f, "edges ({e}) and ({g}) cross"),
            Violation::EdgeCount { expected, found } => {
                write!(f, "expected {expected} edges, found {found}")
            }
            Violation::BadVertex(v) => write!(f, "faces around vertex {v} are not triangles"),
            Violation::MissingHullEdge(e) => write!(f, "hull edge ({e}) missing"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriangulationError {
    #[error("no such edge ({0})")]
    NoSuchEdge(Edge),
    #[error("illegal flip of ({0})")]
    IllegalFlip(Edge),
    #[error("invalid triangulation: {0}")]
    Invalid(Violation),
    #[error("partial edge set has crossing edges ({0}) and ({1})")]
    PartialCrossing(Edge, Edge),
    #[error("step {index}: expected to insert ({expected}), sequence says ({found})")]
    StepMismatch {
        index: usize,
        expected: Edge,
        found: Edge,
    },
    #[error("step {index}: edge ({edge}) is absent")]
    StepAbsent { index: usize, edge: Edge },
    #[error("step {index}: edge ({edge}) is not flippable")]
    StepIllegal { index: usize, edge: Edge },
}

pub(crate) const NONE: usize = usize::MAX;

/// Apexes of the triangles on both sides of an edge `a -> b` (`a < b`):
/// `left` is counterclockwise of the directed edge. `NONE` marks the outer face.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Wings {
    pub left: usize,
    pub right: usize,
}

#[derive(Clone)]
pub struct Triangulation {
    ps: Arc<PointSet>,
    wings: FxHashMap<Edge, Wings>,
}

impl fmt::Debug for Triangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Triangulation")
            .field("edges", &self.edges_sorted())
            .finish()
    }
}

impl PartialEq for Triangulation {
    fn eq(&self, other: &Self) -> bool {
        self.wings.len() == other.wings.len() && self.wings.keys().all(|e| other.contains(*e))
    }
}

impl Triangulation {
    /// Validates `edges` over `ps` and derives the triangle structure.
    pub fn from_edges<I>(ps: Arc<PointSet>, edges: I) -> Result<Self, TriangulationError>
    where
        I: IntoIterator<Item = Edge>,
    {
        let set: FxHashSet<Edge> = edges.into_iter().collect();
        let list: Vec<Edge> = set.into_iter().collect();
        match validate_triangulation(&ps, &list) {
            Ok(()) => {}
            Err(v) => return Err(TriangulationError::Invalid(v)),
        }
        let wings = derive_wings(&ps, &list).expect("validated edge set has a mesh");
        Ok(Triangulation { ps, wings })
    }

    pub fn point_set(&self) -> &Arc<PointSet> {
        &self.ps
    }

    pub fn edge_count(&self) -> usize {
        self.wings.len()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.wings.contains_key(&e)
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.wings.keys().copied()
    }

    pub fn edges_sorted(&self) -> Vec<Edge> {
        let mut v: Vec<Edge> = self.wings.keys().copied().collect();
        v.sort_unstable();
        v
    }

    pub fn edge_set(&self) -> FxHashSet<Edge> {
        self.wings.keys().copied().collect()
    }

    pub fn wings(&self, e: Edge) -> Option<Wings> {
        self.wings.get(&e).copied()
    }

    /// Apex of the triangle to the left of the directed edge `p -> q`.
    pub fn apex_left(&self, p: usize, q: usize) -> Option<usize> {
        let w = self.wings.get(&Edge::new(p, q))?;
        let x = if p < q { w.left } else { w.right };
        (x != NONE).then_some(x)
    }

    /// Triangles as counterclockwise index triples, sorted.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for (e, w) in &self.wings {
            for (apex, ccw) in [(w.left, true), (w.right, false)] {
                if apex == NONE || apex < e.b {
                    continue;
                }
                // record each triangle once, from its two smallest vertices
                let t = if ccw { [e.a, e.b, apex] } else { [e.b, e.a, apex] };
                out.push(rotate_min(t));
            }
        }
        out.sort_unstable();
        out
    }

    /// True iff `e` has two incident triangles whose union is strictly convex.
    pub fn flippable(&self, e: Edge) -> Result<bool, TriangulationError> {
        let w = self.wings.get(&e).ok_or(TriangulationError::NoSuchEdge(e))?;
        Ok(self.flippable_wings(e, *w))
    }

    fn flippable_wings(&self, e: Edge, w: Wings) -> bool {
        w.left != NONE && w.right != NONE && self.ps.convex_quad(e.a, w.right, e.b, w.left)
    }

    /// All flippable edges, sorted.
    pub fn flippable_edges(&self) -> Vec<Edge> {
        let mut v: Vec<Edge> = self
            .wings
            .iter()
            .filter(|(e, w)| self.flippable_wings(**e, **w))
            .map(|(e, _)| *e)
            .collect();
        v.sort_unstable();
        v
    }

    /// The diagonal that would replace `e`, if `e` is interior.
    pub fn opposite(&self, e: Edge) -> Option<Edge> {
        let w = self.wings.get(&e)?;
        (w.left != NONE && w.right != NONE).then(|| Edge::new(w.left, w.right))
    }

    /// Value-semantic flip: returns the new triangulation and the step.
    pub fn apply_flip(&self, e: Edge) -> Result<(Triangulation, FlipStep), TriangulationError> {
        let mut t = self.clone();
        let step = t.flip_in_place(e)?;
        Ok((t, step))
    }

    /// In-place flip, for long replays where copying the edge map per step
    /// would dominate.
    pub fn flip_in_place(&mut self, e: Edge) -> Result<FlipStep, TriangulationError> {
        let w = *self.wings.get(&e).ok_or(TriangulationError::NoSuchEdge(e))?;
        if !self.flippable_wings(e, w) {
            return Err(TriangulationError::IllegalFlip(e));
        }
        let (a, b, c, d) = (e.a, e.b, w.left, w.right);
        self.wings.remove(&e);
        // quadrilateral a d b c is counterclockwise; new triangles (a,d,c), (d,b,c)
        self.replace_apex(Edge::new(a, d), b, c);
        self.replace_apex(Edge::new(d, b), a, c);
        self.replace_apex(Edge::new(b, c), a, d);
        self.replace_apex(Edge::new(c, a), b, d);
        let ne = Edge::new(c, d);
        // directed d -> c has a on its left and b on its right
        let nw = if d < c {
            Wings { left: a, right: b }
        } else {
            Wings { left: b, right: a }
        };
        self.wings.insert(ne, nw);
        Ok(FlipStep {
            removed: e,
            inserted: ne,
        })
    }

    fn replace_apex(&mut self, e: Edge, old: usize, new: usize) {
        let w = self.wings.get_mut(&e).expect("quad boundary edge present");
        if w.left == old {
            w.left = new;
        } else {
            debug_assert_eq!(w.right, old);
            w.right = new;
        }
    }

    pub(crate) fn apply_step_in_place(
        &mut self,
        index: usize,
        s: &FlipStep,
    ) -> Result<(), TriangulationError> {
        let w = match self.wings.get(&s.removed) {
            Some(w) => *w,
            None => {
                return Err(TriangulationError::StepAbsent {
                    index,
                    edge: s.removed,
                })
            }
        };
        if !self.flippable_wings(s.removed, w) {
            return Err(TriangulationError::StepIllegal {
                index,
                edge: s.removed,
            });
        }
        let expected = Edge::new(w.left, w.right);
        if expected != s.inserted {
            return Err(TriangulationError::StepMismatch {
                index,
                expected,
                found: s.inserted,
            });
        }
        self.flip_in_place(s.removed).map(|_| ())
    }

    /// Sorted edge list serialized as little-endian `u32` pairs.
    pub fn canonical_key(&self) -> Vec<u8> {
        canonical_key_of(&self.edges_sorted())
    }

    /// Neighbors of every vertex, each list in counterclockwise order.
    pub fn rotation_system(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.ps.len()];
        for e in self.wings.keys() {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        for (v, list) in adj.iter_mut().enumerate() {
            sort_ccw(&self.ps, v, list);
        }
        adj
    }

    /// Number of edges in the symmetric difference with `other`.
    pub fn symmetric_difference(&self, other: &Triangulation) -> usize {
        let common = self.wings.keys().filter(|e| other.contains(**e)).count();
        self.edge_count() + other.edge_count() - 2 * common
    }
}

fn rotate_min(t: [usize; 3]) -> [usize; 3] {
    let m = (0..3).min_by_key(|&i| t[i]).unwrap();
    [t[m], t[(m + 1) % 3], t[(m + 2) % 3]]
}

pub fn canonical_key_of(sorted_edges: &[Edge]) -> Vec<u8> {
    let mut out = Vec::with_capacity(sorted_edges.len() * 8);
    for e in sorted_edges {
        out.extend_from_slice(&(e.a as u32).to_le_bytes());
        out.extend_from_slice(&(e.b as u32).to_le_bytes());
    }
    out
}

/// Exact direction from `v` to `u` in integer form (scaled by a positive factor).
fn direction(ps: &PointSet, v: usize, u: usize) -> (BigInt, BigInt) {
    let a = ps.hom(v);
    let b = ps.hom(u);
    (&b.x * &a.w - &a.x * &b.w, &b.y * &a.w - &a.y * &b.w)
}

fn upper_half(d: &(BigInt, BigInt)) -> bool {
    d.1.is_positive() || (d.1.is_zero() && d.0.is_positive())
}

fn cmp_angle(p: &(BigInt, BigInt), q: &(BigInt, BigInt)) -> Ordering {
    let (hp, hq) = (upper_half(p), upper_half(q));
    if hp != hq {
        return if hp { Ordering::Less } else { Ordering::Greater };
    }
    let c = &p.0 * &q.1 - &p.1 * &q.0;
    match c.sign() {
        Sign::Plus => Ordering::Less,
        Sign::Minus => Ordering::Greater,
        Sign::NoSign => Ordering::Equal,
    }
}

/// Sorts `list` counterclockwise by angle around `v`, starting at direction `+x`.
pub fn sort_ccw(ps: &PointSet, v: usize, list: &mut [usize]) {
    if list.len() < 2 {
        return;
    }
    let mut keyed: Vec<((BigInt, BigInt), usize)> =
        list.iter().map(|&u| (direction(ps, v, u), u)).collect();
    keyed.sort_by(|x, y| cmp_angle(&x.0, &y.0));
    for (slot, (_, u)) in list.iter_mut().zip(keyed) {
        *slot = u;
    }
}

/// Builds the wing map from a rotation system; `None` if the local structure
/// is not a triangulation (see [`validate_triangulation`]).
fn derive_wings(ps: &PointSet, edges: &[Edge]) -> Result<FxHashMap<Edge, Wings>, Violation> {
    let n = ps.len();
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.a].push(e.b);
        adj[e.b].push(e.a);
    }
    let edge_set: FxHashSet<Edge> = edges.iter().copied().collect();
    let mut on_hull = vec![false; n];
    for &h in ps.hull() {
        on_hull[h] = true;
    }
    let hull = ps.hull();
    let mut hull_next = vec![NONE; n];
    for i in 0..hull.len() {
        hull_next[hull[i]] = hull[(i + 1) % hull.len()];
    }
    let mut wings: FxHashMap<Edge, Wings> = edges
        .iter()
        .map(|e| (*e, Wings { left: NONE, right: NONE }))
        .collect();
    let mut tri_count: FxHashMap<[usize; 3], u8> = FxHashMap::default();
    for v in 0..n {
        let list = &mut adj[v];
        if list.len() < 2 {
            return Err(Violation::BadVertex(v));
        }
        sort_ccw(ps, v, list);
        let k = list.len();
        let mut outer = 0;
        for i in 0..k {
            let b = list[i];
            let c = list[(i + 1) % k];
            if ps.orient(v, b, c) != Orientation::Left {
                outer += 1;
                // the single reflex gap of a hull vertex faces outward: from
                // the hull predecessor b counterclockwise to the successor c
                if !on_hull[v] || hull_next[v] != c {
                    return Err(Violation::BadVertex(v));
                }
                continue;
            }
            if !edge_set.contains(&Edge::new(b, c)) {
                return Err(Violation::BadVertex(v));
            }
            *tri_count.entry(rotate_min([v, b, c])).or_insert(0) += 1;
            // triangle (v, b, c) is counterclockwise: left of v -> b is c
            let e = Edge::new(v, b);
            let w = wings.get_mut(&e).unwrap();
            if v < b {
                w.left = c;
            } else {
                w.right = c;
            }
        }
        if outer != usize::from(on_hull[v]) {
            return Err(Violation::BadVertex(v));
        }
    }
    for (t, c) in &tri_count {
        if *c != 3 {
            return Err(Violation::BadVertex(t[0]));
        }
    }
    if tri_count.len() != 2 * n - ps.hull_size() - 2 {
        return Err(Violation::BadVertex(0));
    }
    Ok(wings)
}

/// Crossing-free and maximal (`|E| = 3n - h - 3`). Small inputs are checked
/// pairwise so that the first crossing pair can be named; large inputs use a
/// local mesh certificate (every vertex star is a fan of counterclockwise
/// triangles, hull vertices have one outer gap between hull neighbours, and
/// every triangle is seen from all three corners), which is equivalent for
/// an edge set of the right size.
pub fn validate_triangulation(ps: &PointSet, edges: &[Edge]) -> Result<(), Violation> {
    let n = ps.len();
    let mut uniq: Vec<Edge> = edges.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    for e in &uniq {
        if e.b >= n {
            return Err(Violation::IndexOutOfRange(e.b));
        }
    }
    if uniq.len() <= 400 {
        for i in 0..uniq.len() {
            for j in i + 1..uniq.len() {
                let (e, f) = (uniq[i], uniq[j]);
                if ps.cross(e.a, e.b, f.a, f.b) {
                    return Err(Violation::Crossing(e, f));
                }
            }
        }
    }
    let expected = ps.triangulation_edge_count();
    if uniq.len() != expected {
        return Err(Violation::EdgeCount {
            expected,
            found: uniq.len(),
        });
    }
    let set: FxHashSet<Edge> = uniq.iter().copied().collect();
    let hull = ps.hull();
    for i in 0..hull.len() {
        let e = Edge::new(hull[i], hull[(i + 1) % hull.len()]);
        if !set.contains(&e) {
            return Err(Violation::MissingHullEdge(e));
        }
    }
    derive_wings(ps, &uniq).map(|_| ())
}

/// Segments between point pairs that no other point-pair segment crosses.
/// Quartic brute force; intended for small sets.
pub fn unavoidable_edges(ps: &PointSet) -> Vec<Edge> {
    let n = ps.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let mut crossed = false;
            'outer: for c in 0..n {
                for d in c + 1..n {
                    if ps.cross(a, b, c, d) {
                        crossed = true;
                        break 'outer;
                    }
                }
            }
            if !crossed {
                out.push(Edge::new(a, b));
            }
        }
    }
    out
}

/// Completes a crossing-free partial edge set by repeatedly inserting the
/// lexicographically smallest absent segment that crosses nothing. A single
/// pass over the pairs in lexicographic order realizes this rule, since a
/// rejected segment stays rejected as edges are added.
pub fn complete_to_triangulation(
    ps: Arc<PointSet>,
    partial: &[Edge],
) -> Result<Triangulation, TriangulationError> {
    let mut edges: Vec<Edge> = partial.to_vec();
    edges.sort_unstable();
    edges.dedup();
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            let (e, f) = (edges[i], edges[j]);
            if ps.cross(e.a, e.b, f.a, f.b) {
                return Err(TriangulationError::PartialCrossing(e, f));
            }
        }
    }
    let present: FxHashSet<Edge> = edges.iter().copied().collect();
    let n = ps.len();
    let target = ps.triangulation_edge_count();
    'pairs: for a in 0..n {
        for b in a + 1..n {
            if edges.len() == target {
                break 'pairs;
            }
            let e = Edge::new(a, b);
            if present.contains(&e) {
                continue;
            }
            if edges.iter().all(|f| !ps.cross(a, b, f.a, f.b)) {
                edges.push(e);
            }
        }
    }
    Triangulation::from_edges(ps, edges)
}
