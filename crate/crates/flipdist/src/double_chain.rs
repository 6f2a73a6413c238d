//! Double chains: two facing convex chains whose stabbed triangulations
//! are encoded by 0/1 label sequences.
//!
//! Naming follows the usual picture: `upper` and `lower` chains ordered
//! left to right along a directed separating line, upper points on its
//! left. The polygon `P_D` is `l_1 .. l_n, u_n .. u_1` (counterclockwise).

use crate::geometry::{orientation, q, Orientation, Point, Rational};
use crate::pointset::PointSet;
use crate::triangulation::{
    complete_to_triangulation, NONE, Edge, FlipSequence, FlipStep, Triangulation, TriangulationError,
};
use num_traits::{One, Signed, Zero};
use rustc_hash::{FxHashMap, FxHashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DoubleChainError {
    #[error("a double chain needs n >= 2, got {0}")]
    TooShort(usize),
    #[error("invalid double chain: {0}")]
    Invalid(String),
    #[error("not a stabbed triangulation")]
    NotStabbed,
    #[error("label sequences have different multisets")]
    LabelMismatch,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("point {0} is not in the kernel")]
    NotInKernel(usize),
    #[error("local triangulation is not a triangulation of the polygon: {0}")]
    NotATriangulation(String),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
}

/// Axis-parallel bounding box for generated chains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub xmin: Rational,
    pub ymin: Rational,
    pub xmax: Rational,
    pub ymax: Rational,
}

impl Frame {
    pub fn new(xmin: Rational, ymin: Rational, xmax: Rational, ymax: Rational) -> Self {
        Frame {
            xmin,
            ymin,
            xmax,
            ymax,
        }
    }
}

impl Default for Frame {
    fn default() -> Self {
        Frame::new(q(0, 1), q(0, 1), q(1, 1), q(1, 1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Upper,
    Lower,
}

#[derive(Debug, Clone)]
pub struct DoubleChain {
    pub n: usize,
    /// `u_1 .. u_n` as point indices.
    pub upper: Vec<usize>,
    /// `l_1 .. l_n` as point indices.
    pub lower: Vec<usize>,
    pub point_set: Arc<PointSet>,
    /// Directed separating line, left to right.
    pub separator: (Point, Point),
    roles: FxHashMap<usize, (Side, usize)>,
}

impl DoubleChain {
    /// Builds and validates a double chain over existing points.
    pub fn new(
        point_set: Arc<PointSet>,
        upper: Vec<usize>,
        lower: Vec<usize>,
        separator: (Point, Point),
    ) -> Result<Self, DoubleChainError> {
        let d = Self::new_unchecked(point_set, upper, lower, separator)?;
        d.validate()?;
        Ok(d)
    }

    /// Same as [`DoubleChain::new`] without the quadratic visibility check.
    pub fn new_unchecked(
        point_set: Arc<PointSet>,
        upper: Vec<usize>,
        lower: Vec<usize>,
        separator: (Point, Point),
    ) -> Result<Self, DoubleChainError> {
        let n = upper.len();
        if n < 2 {
            return Err(DoubleChainError::TooShort(n));
        }
        if lower.len() != n {
            return Err(DoubleChainError::Invalid("chains differ in length".into()));
        }
        let mut roles = FxHashMap::default();
        for (i, &u) in upper.iter().enumerate() {
            roles.insert(u, (Side::Upper, i));
        }
        for (i, &l) in lower.iter().enumerate() {
            roles.insert(l, (Side::Lower, i));
        }
        if roles.len() != 2 * n {
            return Err(DoubleChainError::Invalid("repeated point".into()));
        }
        Ok(DoubleChain {
            n,
            upper,
            lower,
            point_set,
            separator,
            roles,
        })
    }

    /// Checks convexity of both chains, separation and mutual visibility.
    pub fn validate(&self) -> Result<(), DoubleChainError> {
        self.validate_shape()?;
        let ps = &self.point_set;
        let (a, b) = &self.separator;
        if self.upper.iter().any(|&u| orientation(a, b, ps.point(u)) != Orientation::Left)
            || self.lower.iter().any(|&l| orientation(a, b, ps.point(l)) != Orientation::Right)
        {
            return Err(DoubleChainError::Invalid("separator does not split the chains".into()));
        }
        Ok(())
    }

    /// Convexity and mutual visibility, ignoring the separator.
    pub fn validate_shape(&self) -> Result<(), DoubleChainError> {
        let ps = &self.point_set;
        let bad = |m: &str| Err(DoubleChainError::Invalid(m.to_string()));
        for w in self.upper.windows(3) {
            if ps.orient(w[0], w[1], w[2]) != Orientation::Left {
                return bad("upper chain is not reflex towards the lower chain");
            }
        }
        for w in self.lower.windows(3) {
            if ps.orient(w[0], w[1], w[2]) != Orientation::Right {
                return bad("lower chain is not reflex towards the upper chain");
            }
        }
        // every lower point strictly below every upper edge line (and vice
        // versa) gives visibility between all pairs
        for w in self.upper.windows(2) {
            if self.lower.iter().any(|&l| ps.orient(w[0], w[1], l) != Orientation::Right) {
                return bad("a lower point does not see the upper chain");
            }
        }
        for w in self.lower.windows(2) {
            if self.upper.iter().any(|&u| ps.orient(w[0], w[1], u) != Orientation::Left) {
                return bad("an upper point does not see the lower chain");
            }
        }
        Ok(())
    }

    pub fn role(&self, p: usize) -> Option<(Side, usize)> {
        self.roles.get(&p).copied()
    }

    pub fn contains(&self, p: usize) -> bool {
        self.roles.contains_key(&p)
    }

    pub fn u(&self, i: usize) -> usize {
        self.upper[i]
    }

    pub fn l(&self, i: usize) -> usize {
        self.lower[i]
    }

    /// Vertices of `P_D` in counterclockwise order.
    pub fn polygon(&self) -> Vec<usize> {
        self.lower.iter().chain(self.upper.iter().rev()).copied().collect()
    }

    /// Edges of the polygon `P_D`.
    pub fn boundary_edges(&self) -> Vec<Edge> {
        let p = self.polygon();
        let mut out: Vec<Edge> = (0..p.len()).map(|i| Edge::new(p[i], p[(i + 1) % p.len()])).collect();
        out.sort_unstable();
        out
    }

    /// The same chain over `points` followed by `extra` (indices unchanged).
    pub fn with_extra_points(&self, extra: Vec<Point>) -> Result<DoubleChain, DoubleChainError> {
        let mut pts = self.point_set.points().to_vec();
        pts.extend(extra);
        let ps = PointSet::new(pts).map_err(|e| DoubleChainError::Invalid(e.to_string()))?;
        DoubleChain::new(Arc::new(ps), self.upper.clone(), self.lower.clone(), self.separator.clone())
    }

    /// Edge between an upper and a lower point.
    pub fn spanning(&self, e: Edge) -> Option<(usize, usize)> {
        match (self.role(e.a)?, self.role(e.b)?) {
            ((Side::Upper, i), (Side::Lower, j)) | ((Side::Lower, j), (Side::Upper, i)) => Some((i, j)),
            _ => None,
        }
    }

    /// Diagonals of the `P_D` triangulation encoded by `labels`, including
    /// the two closing edges `u_1 l_1` and `u_n l_n`.
    pub fn diagonals(&self, labels: &LabelSequence) -> Result<Vec<Edge>, DoubleChainError> {
        let ones = labels.0.iter().filter(|&&b| b == 1).count();
        if labels.0.len() != 2 * (self.n - 1) || ones != self.n - 1 {
            return Err(DoubleChainError::LabelMismatch);
        }
        let (mut i, mut j) = (0, 0);
        let mut out = vec![Edge::new(self.u(0), self.l(0))];
        for &b in &labels.0 {
            if b == 1 {
                i += 1;
            } else {
                j += 1;
            }
            out.push(Edge::new(self.u(i), self.l(j)));
        }
        Ok(out)
    }

    /// Triangulation of the whole point set whose stabbed part is encoded by
    /// `labels` and whose remainder is the lexicographic completion of the
    /// fan triangulation `T1` together with `extra` edges.
    pub fn stabbed_triangulation(
        &self,
        labels: &LabelSequence,
        extra: &[Edge],
    ) -> Result<Triangulation, DoubleChainError> {
        let first = LabelSequence::sorted(self.n);
        let mut required = self.boundary_edges();
        required.extend(self.diagonals(&first)?);
        required.extend_from_slice(extra);
        let base = complete_to_triangulation(self.point_set.clone(), &required)?;
        let old: FxHashSet<Edge> = self.diagonals(&first)?.into_iter().collect();
        let mut edges: Vec<Edge> = base.edges().filter(|e| !old.contains(e)).collect();
        edges.extend(self.diagonals(labels)?);
        edges.extend(self.boundary_edges());
        edges.sort_unstable();
        edges.dedup();
        Ok(Triangulation::from_edges(self.point_set.clone(), edges)?)
    }

    /// The two fan triangulations `T1` (from `u_1`) and `T2` (from `l_1`)
    /// with identical triangulations outside `P_D`.
    pub fn fan_triangulations(&self) -> Result<(Triangulation, Triangulation), DoubleChainError> {
        self.fan_triangulations_with(&[])
    }

    /// Fan triangulations that also contain every edge of `extra`.
    pub fn fan_triangulations_with(
        &self,
        extra: &[Edge],
    ) -> Result<(Triangulation, Triangulation), DoubleChainError> {
        let t1 = self.stabbed_triangulation(&LabelSequence::sorted(self.n), extra)?;
        let t2 = self.stabbed_triangulation(&LabelSequence::sorted(self.n).complement_order(), extra)?;
        Ok((t1, t2))
    }
}

/// Places `2n` points on two shallow parabolic arcs inside `frame`: the
/// upper arc sags towards the lower one and vice versa. Lower points get
/// indices `0..n`, upper points `n..2n`.
pub fn build_double_chain(n: usize, frame: &Frame) -> Result<(Arc<PointSet>, DoubleChain), DoubleChainError> {
    if n < 2 {
        return Err(DoubleChainError::TooShort(n));
    }
    let w = &frame.xmax - &frame.xmin;
    let h = &frame.ymax - &frame.ymin;
    let sag = &h / Rational::from_integer(16.into());
    let steps = Rational::from_integer(((n - 1) as i64).into());
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for i in 0..n {
        let r = Rational::from_integer((i as i64).into()) / &steps;
        let t = &r * Rational::from_integer(2.into()) - Rational::one();
        let bend = &sag * (Rational::one() - &t * &t);
        let x = &frame.xmin + &w * &r;
        lower.push(Point::new(x.clone(), &frame.ymin + &bend));
        upper.push(Point::new(x, &frame.ymax - &bend));
    }
    let mut pts = lower;
    pts.extend(upper);
    let ps = Arc::new(
        PointSet::new(pts).map_err(|e| DoubleChainError::Invalid(e.to_string()))?,
    );
    let mid = (&frame.ymin + &frame.ymax) / Rational::from_integer(2.into());
    let sep = (
        Point::new(frame.xmin.clone(), mid.clone()),
        Point::new(frame.xmax.clone(), mid),
    );
    let d = DoubleChain::new(ps.clone(), (n..2 * n).collect(), (0..n).collect(), sep)?;
    Ok((ps, d))
}

/// Labels of the triangles stabbed by the separating line, left to right:
/// `1` for two upper vertices, `0` for two lower vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelSequence(pub Vec<u8>);

impl LabelSequence {
    /// `0^(n-1) 1^(n-1)`, the sequence of `T1`.
    pub fn sorted(n: usize) -> Self {
        let mut v = vec![0u8; n - 1];
        v.extend(std::iter::repeat_n(1u8, n - 1));
        LabelSequence(v)
    }

    /// Same multiset with all ones first (the sequence of `T2` when applied
    /// to [`LabelSequence::sorted`]).
    pub fn complement_order(&self) -> Self {
        let mut v = self.0.clone();
        v.sort_unstable_by(|a, b| b.cmp(a));
        LabelSequence(v)
    }
}

impl fmt::Display for LabelSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for LabelSequence {
    type Err = DoubleChainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(DoubleChainError::LabelMismatch),
            })
            .collect::<Result<Vec<u8>, _>>()
            .map(LabelSequence)
    }
}

/// Walks the triangles crossed by the separating line from `u_1 l_1` to
/// `u_n l_n`.
pub fn label_sequence(d: &DoubleChain, t: &Triangulation) -> Result<LabelSequence, DoubleChainError> {
    Ok(LabelSequence(stabbed_triangles(d, t)?.into_iter().map(|(_, b)| b).collect()))
}

/// The stabbed triangles in order as `(u_i, l_j, apex)` with their labels.
pub fn stabbed_triangles(d: &DoubleChain, t: &Triangulation) -> Result<Vec<([usize; 3], u8)>, DoubleChainError> {
    for e in d.boundary_edges() {
        if !t.contains(e) {
            return Err(DoubleChainError::NotStabbed);
        }
    }
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(2 * (d.n - 1));
    while (i, j) != (d.n - 1, d.n - 1) {
        let apex = t.apex_left(d.u(i), d.l(j)).ok_or(DoubleChainError::NotStabbed)?;
        let tri = [d.u(i), d.l(j), apex];
        match d.role(apex) {
            Some((Side::Upper, k)) if k == i + 1 => {
                out.push((tri, 1));
                i += 1;
            }
            Some((Side::Lower, k)) if k == j + 1 => {
                out.push((tri, 0));
                j += 1;
            }
            _ => return Err(DoubleChainError::NotStabbed),
        }
    }
    Ok(out)
}

/// Minimum number of adjacent transpositions turning `s1` into `s2`.
pub fn inversion_distance(s1: &LabelSequence, s2: &LabelSequence) -> Result<usize, DoubleChainError> {
    let ones = |s: &LabelSequence| -> Vec<usize> {
        s.0.iter().enumerate().filter(|(_, &b)| b == 1).map(|(i, _)| i).collect()
    };
    let (a, b) = (ones(s1), ones(s2));
    if s1.0.len() != s2.0.len() || a.len() != b.len() || s1.0.iter().chain(&s2.0).any(|&x| x > 1) {
        return Err(DoubleChainError::LabelMismatch);
    }
    // the k-th one moves to the k-th one's position
    Ok(a.iter().zip(&b).map(|(x, y)| x.abs_diff(*y)).sum())
}

/// Position of a point relative to a double chain. `in_kernel` may hold
/// together with either of the other flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointClass {
    pub in_wedge: bool,
    pub in_polygon: bool,
    pub in_kernel: bool,
}

impl PointClass {
    /// Not contained in the wedge or the polygon.
    pub fn is_outside(&self) -> bool {
        !self.in_wedge && !self.in_polygon
    }
}

/// Directed line; the kept half-plane is on the given side (closed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfPlane {
    pub from: Point,
    pub to: Point,
    pub keep: Orientation,
}

impl HalfPlane {
    pub fn contains(&self, p: &Point) -> bool {
        let o = orientation(&self.from, &self.to, p);
        o == Orientation::Collinear || o == self.keep
    }
}

/// The four rays bounding `W ∪ P_D` and the four half-planes of the kernel.
#[derive(Debug, Clone)]
pub struct WedgeKernel {
    /// Rays from `u_1`, `l_1`, `u_n`, `l_n` as (origin, direction).
    pub rays: [(Point, (Rational, Rational)); 4],
    pub kernel_halfplanes: [HalfPlane; 4],
}

impl DoubleChain {
    fn pt(&self, i: usize) -> &Point {
        self.point_set.point(i)
    }

    pub fn wedge_kernel(&self) -> WedgeKernel {
        let n = self.n;
        let ray = |a: usize, b: usize| (self.pt(a).clone(), self.pt(a).sub(self.pt(b)));
        let hp = |a: usize, b: usize, keep| HalfPlane {
            from: self.pt(a).clone(),
            to: self.pt(b).clone(),
            keep,
        };
        WedgeKernel {
            rays: [
                ray(self.u(0), self.u(1)),
                ray(self.l(0), self.l(1)),
                ray(self.u(n - 1), self.u(n - 2)),
                ray(self.l(n - 1), self.l(n - 2)),
            ],
            kernel_halfplanes: [
                hp(self.u(0), self.u(1), Orientation::Right),
                hp(self.u(n - 2), self.u(n - 1), Orientation::Right),
                hp(self.l(0), self.l(1), Orientation::Left),
                hp(self.l(n - 2), self.l(n - 1), Orientation::Left),
            ],
        }
    }

    /// Closed double wedge at one end: the two sectors between the supporting
    /// lines of the end edges that avoid the chains.
    fn in_end_wedge(&self, p: &Point, u0: usize, u1: usize, l0: usize, l1: usize) -> bool {
        let su = orientation(self.pt(u0), self.pt(u1), p);
        let sl = orientation(self.pt(l0), self.pt(l1), p);
        su == Orientation::Collinear || sl == Orientation::Collinear || su != sl
    }

    /// Closed point-in-polygon test for `P_D` by crossing parity.
    fn in_polygon(&self, p: &Point) -> bool {
        let poly = self.polygon();
        let m = poly.len();
        let mut inside = false;
        for k in 0..m {
            let a = self.pt(poly[k]);
            let b = self.pt(poly[(k + 1) % m]);
            let o = orientation(a, b, p);
            if o == Orientation::Collinear {
                let (lo_x, hi_x) = if a.x <= b.x { (&a.x, &b.x) } else { (&b.x, &a.x) };
                let (lo_y, hi_y) = if a.y <= b.y { (&a.y, &b.y) } else { (&b.y, &a.y) };
                if *lo_x <= p.x && p.x <= *hi_x && *lo_y <= p.y && p.y <= *hi_y {
                    return true;
                }
            }
            // half-open rule on y for the horizontal ray to +x
            if (a.y > p.y) != (b.y > p.y) {
                let upward = b.y > a.y;
                if (o == Orientation::Left) == upward {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn classify_point(&self, p: &Point) -> PointClass {
        let n = self.n;
        let in_wedge = self.in_end_wedge(p, self.u(0), self.u(1), self.l(0), self.l(1))
            || self.in_end_wedge(p, self.u(n - 2), self.u(n - 1), self.l(n - 2), self.l(n - 1));
        let in_kernel = self.wedge_kernel().kernel_halfplanes.iter().all(|h| h.contains(p));
        PointClass {
            in_wedge,
            in_polygon: self.in_polygon(p),
            in_kernel,
        }
    }
}

/// Free-function form of [`DoubleChain::classify_point`].
pub fn classify_point(d: &DoubleChain, p: &Point) -> PointClass {
    d.classify_point(p)
}

/// A triangulation of the polygon `P_D`: its boundary edges plus diagonals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalTriangulation {
    pub edges: Vec<Edge>,
}

impl LocalTriangulation {
    /// Edges between the chains, including the closing edges.
    pub fn spanning_edges(&self, d: &DoubleChain) -> Vec<Edge> {
        self.edges.iter().copied().filter(|e| d.spanning(*e).is_some()).collect()
    }

    /// Label sequence obtained by walking the spanning edges in order.
    pub fn labels(&self, d: &DoubleChain) -> Result<LabelSequence, DoubleChainError> {
        let set: FxHashSet<(usize, usize)> =
            self.edges.iter().filter_map(|e| d.spanning(*e)).collect();
        let (mut i, mut j) = (0, 0);
        let mut labels = Vec::new();
        while (i, j) != (d.n - 1, d.n - 1) {
            if i + 1 < d.n && set.contains(&(i + 1, j)) {
                labels.push(1);
                i += 1;
            } else if j + 1 < d.n && set.contains(&(i, j + 1)) {
                labels.push(0);
                j += 1;
            } else {
                return Err(DoubleChainError::NotStabbed);
            }
        }
        Ok(LabelSequence(labels))
    }
}

/// Where a segment leaves the closed region `W ∪ P_D` through the upper or
/// lower boundary: the chain index its mapped endpoint slides to.
fn exit_index(d: &DoubleChain, side: Side, a: &Point, b: &Point) -> Option<usize> {
    let chain = match side {
        Side::Upper => &d.upper,
        Side::Lower => &d.lower,
    };
    let n = d.n;
    let p = |k: usize| d.pt(chain[k]);
    // (origin, direction, bounded) pieces of the extended chain
    let mut pieces: Vec<(usize, &Point, (Rational, Rational), bool)> = Vec::with_capacity(n + 1);
    pieces.push((0, p(0), p(0).sub(p(1)), false));
    for k in 0..n - 1 {
        pieces.push((k + 1, p(k), p(k + 1).sub(p(k)), true));
    }
    pieces.push((n - 1, p(n - 1), p(n - 1).sub(p(n - 2)), false));
    let (ex, ey) = b.sub(a);
    for (target, o, (dx, dy), bounded) in pieces {
        let den = &ex * &dy - &ey * &dx;
        if den.is_zero() {
            continue;
        }
        let (ox, oy) = o.sub(a);
        // a + s e = o + t d
        let s = (&ox * &dy - &oy * &dx) / &den;
        let t = (&ox * &ey - &oy * &ex) / &den;
        let in_seg = s.is_positive() && s < Rational::one();
        let in_piece = t.is_positive() && (!bounded || t < Rational::one());
        if in_seg && in_piece {
            return Some(target);
        }
    }
    None
}

/// Where a point that is not a chain point lies with respect to the
/// extended chains: strictly above the upper one, strictly below the lower
/// one, or in between.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Band {
    Above,
    Below,
    Between,
}

fn band(d: &DoubleChain, p: &Point) -> Band {
    let ps = &d.point_set;
    if d.upper.windows(2).all(|w| ps.orient_point(w[0], w[1], p) == Orientation::Left) {
        Band::Above
    } else if d.lower.windows(2).all(|w| ps.orient_point(w[0], w[1], p) == Orientation::Right) {
        Band::Below
    } else {
        Band::Between
    }
}

/// Image of a triangulation edge under the endpoint-sliding map, if the edge
/// disconnects `W ∪ P_D`.
fn slide(d: &DoubleChain, bands: &FxHashMap<usize, Band>, e: Edge) -> Option<Edge> {
    let pt = |i: usize| d.pt(i);
    let end = |v: usize| -> Result<(Side, usize), Band> {
        match d.role(v) {
            Some(r) => Ok(r),
            None => Err(bands[&v]),
        }
    };
    let (ra, rb) = (end(e.a), end(e.b));
    let (ui, lj) = match (ra, rb) {
        (Ok((Side::Upper, i)), Ok((Side::Lower, j))) | (Ok((Side::Lower, j)), Ok((Side::Upper, i))) => {
            (i, j)
        }
        (Ok(_), Ok(_)) => return None,
        (Ok((Side::Upper, i)), Err(Band::Below)) | (Err(Band::Below), Ok((Side::Upper, i))) => {
            (i, exit_index(d, Side::Lower, pt(e.a), pt(e.b))?)
        }
        (Ok((Side::Lower, j)), Err(Band::Above)) | (Err(Band::Above), Ok((Side::Lower, j))) => {
            (exit_index(d, Side::Upper, pt(e.a), pt(e.b))?, j)
        }
        (Err(Band::Above), Err(Band::Below)) | (Err(Band::Below), Err(Band::Above)) => (
            exit_index(d, Side::Upper, pt(e.a), pt(e.b))?,
            exit_index(d, Side::Lower, pt(e.a), pt(e.b))?,
        ),
        _ => return None,
    };
    Some(Edge::new(d.u(ui), d.l(lj)))
}

fn is_wide(d: &DoubleChain, e: Edge) -> bool {
    !d.contains(e.a) && !d.contains(e.b)
}

/// Resolves a wide edge to an edge with an endpoint on the chain that has
/// the same image, walking through incident triangles.
fn resolve_wide(
    d: &DoubleChain,
    t: &Triangulation,
    bands: &FxHashMap<usize, Band>,
    e: Edge,
    image: Edge,
) -> Option<Edge> {
    let mut seen = FxHashSet::default();
    let mut stack = vec![e];
    seen.insert(e);
    while let Some(f) = stack.pop() {
        let w = t.wings(f)?;
        for apex in [w.left, w.right] {
            if apex == NONE {
                continue;
            }
            for g in [Edge::new(f.a, apex), Edge::new(f.b, apex)] {
                if seen.contains(&g) || slide(d, bands, g) != Some(image) {
                    continue;
                }
                if !is_wide(d, g) {
                    return Some(g);
                }
                seen.insert(g);
                stack.push(g);
            }
        }
    }
    None
}

fn outside_bands(d: &DoubleChain, t: &Triangulation) -> Result<FxHashMap<usize, Band>, DoubleChainError> {
    let ps = t.point_set();
    let mut bands = FxHashMap::default();
    for v in 0..ps.len() {
        if d.contains(v) {
            continue;
        }
        if !d.classify_point(ps.point(v)).is_outside() {
            return Err(DoubleChainError::PreconditionViolated(format!("point {v} is not outside")));
        }
        bands.insert(v, band(d, ps.point(v)));
    }
    Ok(bands)
}

/// Every edge of `t` that disconnects `W ∪ P_D`, paired with its image.
pub fn edge_images(d: &DoubleChain, t: &Triangulation) -> Result<Vec<(Edge, Edge)>, DoubleChainError> {
    let bands = outside_bands(d, t)?;
    let mut out: Vec<(Edge, Edge)> = t
        .edges()
        .filter_map(|e| slide(d, &bands, e).map(|img| (e, img)))
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// The local triangulation `L(T)` of `P_D` induced by `t`. Edges with an
/// endpoint on the chain are slid directly; each wide edge is resolved by
/// walking to a chain edge with the same image.
pub fn local_triangulation(d: &DoubleChain, t: &Triangulation) -> Result<LocalTriangulation, DoubleChainError> {
    let bands = outside_bands(d, t)?;
    let mut images: FxHashSet<Edge> = FxHashSet::default();
    for e in t.edges() {
        let Some(img) = slide(d, &bands, e) else {
            continue;
        };
        if is_wide(d, e) {
            let g = resolve_wide(d, t, &bands, e, img).ok_or_else(|| {
                DoubleChainError::NotATriangulation(format!("wide edge ({e}) has no chain preimage partner"))
            })?;
            images.insert(slide(d, &bands, g).expect("resolved edge has an image"));
        } else {
            images.insert(img);
        }
    }
    let mut edges: Vec<Edge> = images.into_iter().chain(d.boundary_edges()).collect();
    edges.sort_unstable();
    edges.dedup();
    let local = LocalTriangulation { edges };
    check_local(d, &local)?;
    Ok(local)
}

fn check_local(d: &DoubleChain, t: &LocalTriangulation) -> Result<(), DoubleChainError> {
    let spanning = t.spanning_edges(d);
    if spanning.len() != 2 * d.n - 1 {
        return Err(DoubleChainError::NotATriangulation(format!(
            "{} edges between the chains, expected {}",
            spanning.len(),
            2 * d.n - 1
        )));
    }
    let ps = &d.point_set;
    for (k, e) in spanning.iter().enumerate() {
        for f in &spanning[k + 1..] {
            if ps.cross(e.a, e.b, f.a, f.b) {
                return Err(DoubleChainError::NotATriangulation(format!("({e}) crosses ({f})")));
            }
        }
    }
    t.labels(d).map(|_| ())
}

/// Flips every spanning edge opposite `s` until `s` sees the whole chain;
/// returns the steps taken.
fn flip_to_star(d: &DoubleChain, s: usize, t: &mut Triangulation) -> Result<Vec<FlipStep>, DoubleChainError> {
    // flips only add edges at s, so one neighbour found up front stays valid
    let start = t
        .edges()
        .filter(|e| e.has(s))
        .map(|e| e.other(s))
        .min()
        .ok_or_else(|| DoubleChainError::PreconditionViolated("isolated kernel point".into()))?;
    let mut steps = Vec::new();
    loop {
        let mut candidates = Vec::new();
        for (a, b) in fan_around(t, s, start) {
            // triangle (s, a, b) is counterclockwise; its far side is left of b -> a
            let e = Edge::new(a, b);
            if d.spanning(e).is_some()
                && t.apex_left(b, a).is_some_and(|c| d.contains(c))
                && t.flippable(e)?
            {
                candidates.push(e);
            }
        }
        let Some(e) = candidates.into_iter().min() else {
            break;
        };
        steps.push(t.flip_in_place(e)?);
    }
    Ok(steps)
}

/// Counterclockwise triangles `(s, a, b)` around `s`, as `(a, b)` pairs.
fn fan_around(t: &Triangulation, s: usize, start: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut a = start;
    while let Some(b) = t.apex_left(s, a) {
        out.push((a, b));
        a = b;
        if a == start {
            return out;
        }
    }
    // s is on the hull: pick up the triangles clockwise of start
    let mut b = start;
    while let Some(a) = t.apex_left(b, s) {
        out.push((a, b));
        b = a;
    }
    out
}

/// Flip sequence from `from` to `to` through the triangulation in which the
/// kernel point `s` is adjacent to every chain point.
pub fn kernel_steiner_sequence(
    d: &DoubleChain,
    s: usize,
    from: &Triangulation,
    to: &Triangulation,
) -> Result<FlipSequence, DoubleChainError> {
    if !d.classify_point(d.point_set.point(s)).in_kernel || d.contains(s) {
        return Err(DoubleChainError::NotInKernel(s));
    }
    let mut a = from.clone();
    let mut b = to.clone();
    let mut steps = flip_to_star(d, s, &mut a)?;
    let back = flip_to_star(d, s, &mut b)?;
    if a.edges_sorted() != b.edges_sorted() {
        return Err(DoubleChainError::PreconditionViolated(
            "triangulations differ away from the double chain".into(),
        ));
    }
    steps.extend(back.iter().rev().map(|f| FlipStep {
        removed: f.inserted,
        inserted: f.removed,
    }));
    Ok(FlipSequence::new(steps))
}

/// A point in the kernel just left of `u_1 l_1`, outside `P_D`.
pub fn left_kernel_point(d: &DoubleChain) -> Option<Point> {
    let (u, l) = (d.pt(d.u(0)), d.pt(d.l(0)));
    let mid = u.midpoint(l);
    let (dx, dy) = d.separator.0.sub(&d.separator.1);
    let mut step = q(1, 64);
    for _ in 0..64 {
        let p = mid.offset(&dx, &dy, &step);
        let c = d.classify_point(&p);
        if c.in_kernel && !c.in_polygon {
            return Some(p);
        }
        step /= Rational::from_integer(2.into());
    }
    None
}
