//! Exact flip distance, flip-graph enumeration, the crossing-count upper
//! bound and Lawson flipping to the Delaunay triangulation.
//!
//! Searches run on a compact state: the edge set as a bitset over all point
//! pairs. Triangle structure is recovered from the bitset on demand, which
//! keeps a search node at a few machine words.

use crate::geometry::{in_circle, CirclePosition, Orientation};
use crate::pointset::PointSet;
use crate::triangulation::{Edge, FlipSequence, FlipStep, Triangulation, TriangulationError};
use rustc_hash::{FxHashMap, FxHashSet};
use std::collections::BTreeSet;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("flip graph too large (more than {0} nodes)")]
    FlipGraphTooLarge(usize),
    #[error("search memory cap of {0} nodes exceeded")]
    MemoryCap(usize),
    #[error("triangulations are over different point sets")]
    PointSetMismatch,
    #[error("frozen edge ({0}) is missing from an endpoint triangulation")]
    FrozenEdgeMissing(Edge),
    #[error("Delaunay not unique: points {0:?} are cocircular")]
    DelaunayNotUnique([usize; 4]),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
}

/// Outcome of a budgeted distance query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Distance {
    Exact(usize),
    Exceeded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceResult {
    pub distance: Distance,
    /// Present iff the distance is finite; lexicographically smallest among
    /// shortest flip sequences.
    pub witness: Option<FlipSequence>,
    pub nodes_expanded: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    /// Hard cap on stored search nodes; exceeding it is an error.
    pub max_nodes: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_nodes: 20_000_000,
        }
    }
}

type State = Box<[u64]>;

/// Shared precomputation for searches over one point set.
pub(crate) struct Engine {
    ps: Arc<PointSet>,
    n: usize,
    words: usize,
    orient: Option<Vec<i8>>,
    frozen: FxHashSet<Edge>,
}

impl Engine {
    pub(crate) fn new(ps: Arc<PointSet>, frozen: &[Edge]) -> Self {
        let n = ps.len();
        let pairs = n * (n - 1) / 2;
        let orient = (n <= 48).then(|| {
            let mut t = vec![0i8; n * n * n];
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if a != b && b != c && a != c {
                            t[(a * n + b) * n + c] = match ps.orient(a, b, c) {
                                Orientation::Left => 1,
                                Orientation::Right => -1,
                                Orientation::Collinear => 0,
                            };
                        }
                    }
                }
            }
            t
        });
        Engine {
            n,
            words: pairs.div_ceil(64).max(1),
            ps,
            orient,
            frozen: frozen.iter().copied().collect(),
        }
    }

    fn or(&self, a: usize, b: usize, c: usize) -> i8 {
        match &self.orient {
            Some(t) => t[(a * self.n + b) * self.n + c],
            None => match self.ps.orient(a, b, c) {
                Orientation::Left => 1,
                Orientation::Right => -1,
                Orientation::Collinear => 0,
            },
        }
    }

    fn pair(&self, a: usize, b: usize) -> usize {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        // row-major index into the strict upper triangle
        a * (2 * self.n - a - 1) / 2 + (b - a - 1)
    }

    fn unpair(&self, mut idx: usize) -> Edge {
        let mut a = 0;
        loop {
            let row = self.n - a - 1;
            if idx < row {
                return Edge::new(a, a + 1 + idx);
            }
            idx -= row;
            a += 1;
        }
    }

    pub(crate) fn encode(&self, t: &Triangulation) -> State {
        let mut s = vec![0u64; self.words];
        for e in t.edges() {
            let i = self.pair(e.a, e.b);
            s[i / 64] |= 1 << (i % 64);
        }
        s.into_boxed_slice()
    }

    fn has(&self, s: &State, a: usize, b: usize) -> bool {
        let i = self.pair(a, b);
        s[i / 64] >> (i % 64) & 1 == 1
    }

    fn edges_of(&self, s: &State) -> Vec<Edge> {
        let mut out = Vec::new();
        for (w, word) in s.iter().enumerate() {
            let mut bits = *word;
            while bits != 0 {
                let t = bits.trailing_zeros() as usize;
                out.push(self.unpair(w * 64 + t));
                bits &= bits - 1;
            }
        }
        out
    }

    fn adjacency(&self, edges: &[Edge]) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in edges {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        adj
    }

    /// Apex of the face left (`side = 1`) or right (`side = -1`) of `a -> b`:
    /// the neighbour of `a` on that side making the smallest angle with `ab`.
    fn apex(&self, adj: &[Vec<usize>], s: &State, a: usize, b: usize, side: i8) -> Option<usize> {
        let mut best: Option<usize> = None;
        for &c in &adj[a] {
            if c == b || self.or(a, b, c) != side {
                continue;
            }
            best = match best {
                None => Some(c),
                Some(x) if self.or(a, c, x) == side => Some(c),
                keep => keep,
            };
        }
        best.filter(|&c| self.has(s, b, c))
    }

    /// All flips available in `s`, sorted by step.
    fn flips(&self, s: &State) -> Vec<FlipStep> {
        let edges = self.edges_of(s);
        let adj = self.adjacency(&edges);
        let mut out = Vec::new();
        for e in edges {
            if self.frozen.contains(&e) {
                continue;
            }
            let (Some(c), Some(d)) = (self.apex(&adj, s, e.a, e.b, 1), self.apex(&adj, s, e.a, e.b, -1))
            else {
                continue;
            };
            // quadrilateral a d b c, counterclockwise
            if self.or(e.a, d, e.b) == 1
                && self.or(d, e.b, c) == 1
                && self.or(e.b, c, e.a) == 1
                && self.or(c, e.a, d) == 1
            {
                out.push(FlipStep {
                    removed: e,
                    inserted: Edge::new(c, d),
                });
            }
        }
        out.sort_unstable();
        out
    }

    fn apply(&self, s: &State, f: &FlipStep) -> State {
        let mut t = s.clone();
        let i = self.pair(f.removed.a, f.removed.b);
        t[i / 64] &= !(1 << (i % 64));
        let j = self.pair(f.inserted.a, f.inserted.b);
        t[j / 64] |= 1 << (j % 64);
        t
    }

    fn half_sym_diff(&self, s: &State, t: &State) -> usize {
        let d: u32 = s.iter().zip(t.iter()).map(|(x, y)| (x ^ y).count_ones()).sum();
        d as usize / 2
    }
}

fn check_pair(t1: &Triangulation, t2: &Triangulation) -> Result<(), SearchError> {
    if !Arc::ptr_eq(t1.point_set(), t2.point_set()) && t1.point_set().points() != t2.point_set().points() {
        return Err(SearchError::PointSetMismatch);
    }
    Ok(())
}

/// Exact flip distance by layered bidirectional search, pruning any node
/// whose depth plus `|E(T) Δ E(goal)| / 2` exceeds the budget.
pub fn flip_distance(
    t1: &Triangulation,
    t2: &Triangulation,
    budget: usize,
) -> Result<DistanceResult, SearchError> {
    flip_distance_with(t1, t2, budget, &[], SearchConfig::default())
}

/// [`flip_distance`] restricted to triangulations that keep every edge of
/// `frozen` (those edges are never flipped).
pub fn flip_distance_with(
    t1: &Triangulation,
    t2: &Triangulation,
    budget: usize,
    frozen: &[Edge],
    config: SearchConfig,
) -> Result<DistanceResult, SearchError> {
    check_pair(t1, t2)?;
    for f in frozen {
        if !t1.contains(*f) || !t2.contains(*f) {
            return Err(SearchError::FrozenEdgeMissing(*f));
        }
    }
    let eng = Engine::new(t1.point_set().clone(), frozen);
    let s1 = eng.encode(t1);
    let s2 = eng.encode(t2);
    if s1 == s2 {
        return Ok(DistanceResult {
            distance: Distance::Exact(0),
            witness: Some(FlipSequence::default()),
            nodes_expanded: 0,
        });
    }
    let mut ds: FxHashMap<State, usize> = FxHashMap::default();
    let mut dt: FxHashMap<State, usize> = FxHashMap::default();
    ds.insert(s1.clone(), 0);
    dt.insert(s2.clone(), 0);
    let mut layers_s: Vec<Vec<State>> = vec![vec![s1.clone()]];
    let mut layers_t: Vec<Vec<State>> = vec![vec![s2.clone()]];
    let (mut ls, mut lt) = (0usize, 0usize);
    let mut expanded = 0usize;
    let exceeded = |expanded| DistanceResult {
        distance: Distance::Exceeded,
        witness: None,
        nodes_expanded: expanded,
    };
    let found = loop {
        if ls + lt >= budget {
            return Ok(exceeded(expanded));
        }
        let source_side = layers_s[ls].len() <= layers_t[lt].len();
        let (own, other, layers, depth, goal) = if source_side {
            (&mut ds, &dt, &mut layers_s, &mut ls, &s2)
        } else {
            (&mut dt, &ds, &mut layers_t, &mut lt, &s1)
        };
        let mut next = Vec::new();
        let mut meet = false;
        for u in &layers[*depth] {
            expanded += 1;
            for f in eng.flips(u) {
                let v = eng.apply(u, &f);
                if own.contains_key(&v) {
                    continue;
                }
                let g = *depth + 1;
                if g + eng.half_sym_diff(&v, goal) > budget {
                    continue;
                }
                if other.contains_key(&v) {
                    meet = true;
                }
                own.insert(v.clone(), g);
                next.push(v);
            }
            if own.len() + other.len() > config.max_nodes {
                return Err(SearchError::MemoryCap(config.max_nodes));
            }
        }
        *depth += 1;
        if next.is_empty() {
            return Ok(exceeded(expanded));
        }
        layers.push(next);
        if meet {
            break ls + lt;
        }
    };
    let witness = reconstruct(&eng, &ds, &dt, &layers_s, ls, lt, &s1);
    debug_assert_eq!(witness.len(), found);
    Ok(DistanceResult {
        distance: Distance::Exact(found),
        witness: Some(witness),
        nodes_expanded: expanded,
    })
}

/// Lexicographically smallest shortest path: greedy forward walk restricted
/// to nodes known to lie on a shortest path.
fn reconstruct(
    eng: &Engine,
    ds: &FxHashMap<State, usize>,
    dt: &FxHashMap<State, usize>,
    layers_s: &[Vec<State>],
    ls: usize,
    lt: usize,
    s1: &State,
) -> FlipSequence {
    // good[i]: source-layer-i nodes from which a shortest path continues
    let mut good: Vec<FxHashSet<State>> = vec![FxHashSet::default(); ls + 1];
    for u in &layers_s[ls] {
        if dt.get(u) == Some(&lt) {
            good[ls].insert(u.clone());
        }
    }
    for i in (0..ls).rev() {
        for u in &layers_s[i] {
            let ok = eng.flips(u).iter().any(|f| {
                let v = eng.apply(u, f);
                ds.get(&v) == Some(&(i + 1)) && good[i + 1].contains(&v)
            });
            if ok {
                good[i].insert(u.clone());
            }
        }
    }
    let mut steps = Vec::new();
    let mut cur = s1.clone();
    for i in 0..ls {
        let (f, v) = eng
            .flips(&cur)
            .into_iter()
            .map(|f| {
                let v = eng.apply(&cur, &f);
                (f, v)
            })
            .find(|(_, v)| ds.get(v) == Some(&(i + 1)) && good[i + 1].contains(v))
            .expect("shortest path continues");
        steps.push(f);
        cur = v;
    }
    let mut rem = lt;
    while rem > 0 {
        let (f, v) = eng
            .flips(&cur)
            .into_iter()
            .map(|f| {
                let v = eng.apply(&cur, &f);
                (f, v)
            })
            .find(|(_, v)| dt.get(v) == Some(&(rem - 1)))
            .expect("target side continues");
        steps.push(f);
        cur = v;
        rem -= 1;
    }
    FlipSequence::new(steps)
}

/// Plain breadth-first search from `t1`; the reference the bidirectional
/// search is checked against.
pub fn flip_distance_bfs(
    t1: &Triangulation,
    t2: &Triangulation,
    budget: usize,
    frozen: &[Edge],
) -> Result<Distance, SearchError> {
    check_pair(t1, t2)?;
    let eng = Engine::new(t1.point_set().clone(), frozen);
    let s1 = eng.encode(t1);
    let s2 = eng.encode(t2);
    let mut seen: FxHashSet<State> = FxHashSet::default();
    seen.insert(s1.clone());
    let mut layer = vec![s1];
    for d in 0..=budget {
        if layer.contains(&s2) {
            return Ok(Distance::Exact(d));
        }
        let mut next = Vec::new();
        for u in &layer {
            for f in eng.flips(u) {
                let v = eng.apply(u, &f);
                if seen.insert(v.clone()) {
                    next.push(v);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        layer = next;
    }
    Ok(Distance::Exceeded)
}

/// Flip graph: nodes are canonical keys, adjacency pairs index into `nodes`.
#[derive(Debug, Clone)]
pub struct FlipGraph {
    pub nodes: Vec<Vec<u8>>,
    pub adjacency: Vec<(usize, usize)>,
    pub node_payloads: Vec<Vec<Edge>>,
}

impl FlipGraph {
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency
            .iter()
            .filter(|(a, b)| *a == v || *b == v)
            .count()
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut nb = vec![Vec::new(); self.nodes.len()];
        for &(a, b) in &self.adjacency {
            nb[a].push(b);
            nb[b].push(a);
        }
        nb
    }

    /// Breadth-first distances from `src`; `usize::MAX` for unreachable nodes.
    pub fn distances_from(&self, src: usize) -> Vec<usize> {
        let nb = self.neighbors();
        let mut dist = vec![usize::MAX; self.nodes.len()];
        dist[src] = 0;
        let mut queue = std::collections::VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &v in &nb[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.nodes.is_empty() || self.distances_from(0).iter().all(|&d| d != usize::MAX)
    }

    pub fn diameter(&self) -> usize {
        (0..self.nodes.len())
            .map(|s| self.distances_from(s).into_iter().max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    pub fn index_of(&self, t: &Triangulation) -> Option<usize> {
        let key = t.canonical_key();
        self.nodes.iter().position(|k| *k == key)
    }
}

/// Enumerates the flip graph reachable from the lexicographic completion.
pub fn enumerate_flip_graph(ps: Arc<PointSet>, node_cap: usize) -> Result<FlipGraph, SearchError> {
    let start = crate::triangulation::complete_to_triangulation(ps, &[])?;
    enumerate_flip_graph_from(&start, &[], node_cap)
}

/// Enumerates the component of `start` in the flip graph where `frozen`
/// edges may not be flipped.
pub fn enumerate_flip_graph_from(
    start: &Triangulation,
    frozen: &[Edge],
    node_cap: usize,
) -> Result<FlipGraph, SearchError> {
    let eng = Engine::new(start.point_set().clone(), frozen);
    let s0 = eng.encode(start);
    let mut index: FxHashMap<State, usize> = FxHashMap::default();
    let mut states = vec![s0.clone()];
    index.insert(s0, 0);
    let mut adjacency = Vec::new();
    let mut head = 0;
    while head < states.len() {
        let u = states[head].clone();
        for f in eng.flips(&u) {
            let v = eng.apply(&u, &f);
            let j = match index.get(&v) {
                Some(&j) => j,
                None => {
                    if states.len() >= node_cap {
                        return Err(SearchError::FlipGraphTooLarge(node_cap));
                    }
                    let j = states.len();
                    index.insert(v.clone(), j);
                    states.push(v);
                    j
                }
            };
            if head < j {
                adjacency.push((head, j));
            }
        }
        head += 1;
    }
    adjacency.sort_unstable();
    let node_payloads: Vec<Vec<Edge>> = states.iter().map(|s| eng.edges_of(s)).collect();
    let nodes = node_payloads
        .iter()
        .map(|e| crate::triangulation::canonical_key_of(e))
        .collect();
    Ok(FlipGraph {
        nodes,
        adjacency,
        node_payloads,
    })
}

/// Number of properly crossing pairs `(e1, e2)` with `e1` in `t1`, `e2` in `t2`.
pub fn crossing_count(t1: &Triangulation, t2: &Triangulation) -> usize {
    let ps = t1.point_set();
    let e2: Vec<Edge> = t2.edges_sorted();
    let mut count = 0;
    for e in t1.edges_sorted() {
        for f in &e2 {
            if ps.cross(e.a, e.b, f.a, f.b) {
                count += 1;
            }
        }
    }
    count
}

/// True if the interior edge `e` fails the local Delaunay test.
fn locally_illegal(t: &Triangulation, e: Edge) -> Result<bool, SearchError> {
    let Some(w) = t.wings(e) else {
        return Ok(false);
    };
    if w.left == crate::triangulation::NONE || w.right == crate::triangulation::NONE {
        return Ok(false);
    }
    let ps = t.point_set();
    let pos = in_circle(ps.point(e.a), ps.point(e.b), ps.point(w.left), ps.point(w.right))
        .expect("triangle is not degenerate");
    match pos {
        CirclePosition::Inside => Ok(true),
        CirclePosition::Outside => Ok(false),
        CirclePosition::On => {
            let mut q = [e.a, e.b, w.left, w.right];
            q.sort_unstable();
            Err(SearchError::DelaunayNotUnique(q))
        }
    }
}

/// First cocircular quadruple in lexicographic order, if any.
pub fn find_cocircular(ps: &PointSet) -> Option<[usize; 4]> {
    let n = ps.len();
    let p = ps.points();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    if in_circle(&p[a], &p[b], &p[c], &p[d]).ok() == Some(CirclePosition::On) {
                        return Some([a, b, c, d]);
                    }
                }
            }
        }
    }
    None
}

/// Lawson's algorithm: flip the lexicographically smallest locally illegal
/// edge until none remains. Point sets of up to 60 points are checked for
/// cocircular quadruples up front; larger ones fail on the first cocircular
/// quadrilateral met during the run.
pub fn lawson_to_delaunay(t: &Triangulation) -> Result<(Triangulation, FlipSequence), SearchError> {
    let ps = t.point_set().clone();
    if ps.len() <= 60 {
        if let Some(q) = find_cocircular(&ps) {
            return Err(SearchError::DelaunayNotUnique(q));
        }
    }
    let mut cur = t.clone();
    let mut illegal = BTreeSet::new();
    for e in cur.edges_sorted() {
        if locally_illegal(&cur, e)? {
            illegal.insert(e);
        }
    }
    let mut steps = Vec::new();
    while let Some(e) = illegal.pop_first() {
        let step = cur.flip_in_place(e)?;
        // only the new edge and the four sides of its quadrilateral can change status
        let (a, b, c, d) = (e.a, e.b, step.inserted.a, step.inserted.b);
        for f in [step.inserted, Edge::new(a, c), Edge::new(a, d), Edge::new(b, c), Edge::new(b, d)] {
            if locally_illegal(&cur, f)? {
                illegal.insert(f);
            } else {
                illegal.remove(&f);
            }
        }
        steps.push(step);
    }
    Ok((cur, FlipSequence::new(steps)))
}

/// Number of locally illegal edges (used to observe Lawson's progress).
pub fn illegal_edge_count(t: &Triangulation) -> Result<usize, SearchError> {
    let mut c = 0;
    for e in t.edges_sorted() {
        if locally_illegal(t, e)? {
            c += 1;
        }
    }
    Ok(c)
}
