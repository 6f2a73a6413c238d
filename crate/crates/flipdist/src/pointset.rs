//! Indexed point sets with cached integer (homogeneous) coordinates.
//!
//! Every predicate here is exact. Points are stored both as rationals and as
//! `(X, Y, W)` with `x = X / W`, `y = Y / W`, `W > 0`, which lets orientation
//! tests run on plain big-integer determinants without any gcd work.

use crate::geometry::{general_position, Orientation, Point};
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PointSetError {
    #[error("point set needs at least 3 points, got {0}")]
    TooFew(usize),
    #[error("duplicate point at indices {0} and {1}")]
    Duplicate(usize, usize),
    #[error("collinear triple ({0}, {1}, {2})")]
    Collinear(usize, usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct HPoint {
    pub x: BigInt,
    pub y: BigInt,
    pub w: BigInt,
}

impl HPoint {
    fn from_point(p: &Point) -> Self {
        let w = p.x.denom().lcm(p.y.denom());
        let x = p.x.numer() * (&w / p.x.denom());
        let y = p.y.numer() * (&w / p.y.denom());
        HPoint { x, y, w }
    }
}

/// Sign of the 3x3 determinant of homogeneous points with positive weights.
pub(crate) fn orient_h(a: &HPoint, b: &HPoint, c: &HPoint) -> Orientation {
    let t1 = &a.x * (&b.y * &c.w - &b.w * &c.y);
    let t2 = &a.y * (&b.x * &c.w - &b.w * &c.x);
    let t3 = &a.w * (&b.x * &c.y - &b.y * &c.x);
    let d = t1 - t2 + t3;
    match d.sign() {
        Sign::Plus => Orientation::Left,
        Sign::Minus => Orientation::Right,
        Sign::NoSign => Orientation::Collinear,
    }
}

#[derive(Debug, Clone)]
pub struct PointSet {
    points: Vec<Point>,
    hom: Vec<HPoint>,
    approx: Vec<(f64, f64)>,
    hull: Vec<usize>,
    lex: Vec<usize>,
}

impl PartialEq for PointSet {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points
    }
}

impl PointSet {
    /// Builds a point set and checks general position exhaustively.
    pub fn new(points: Vec<Point>) -> Result<Self, PointSetError> {
        let ps = Self::new_unverified(points)?;
        ps.check_general_position()?;
        Ok(ps)
    }

    /// Builds a point set, rejecting fewer than three points and duplicates,
    /// but leaving the collinearity scan to the caller. Generators use this
    /// and run [`PointSet::check_general_position`] as an explicit step.
    pub fn new_unverified(points: Vec<Point>) -> Result<Self, PointSetError> {
        if points.len() < 3 {
            return Err(PointSetError::TooFew(points.len()));
        }
        let approx: Vec<(f64, f64)> = points.iter().map(|p| p.to_f64()).collect();
        let mut order: Vec<usize> = (0..points.len()).collect();
        // floats decide only when clearly apart
        let apart = |u: f64, v: f64| (u - v).abs() > 1e-9 * u.abs().max(v.abs()).max(1e-300);
        order.sort_by(|&a, &b| {
            let (pa, pb) = (approx[a], approx[b]);
            if apart(pa.0, pb.0) {
                return pa.0.total_cmp(&pb.0);
            }
            if pa.0 == pb.0 && points[a].x == points[b].x && apart(pa.1, pb.1) {
                return pa.1.total_cmp(&pb.1);
            }
            points[a].cmp(&points[b])
        });
        for w in order.windows(2) {
            if points[w[0]] == points[w[1]] {
                let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(PointSetError::Duplicate(a, b));
            }
        }
        let hom: Vec<HPoint> = points.iter().map(HPoint::from_point).collect();
        let mut ps = PointSet {
            points,
            hom,
            approx,
            hull: Vec::new(),
            lex: Vec::new(),
        };
        ps.hull = ps.compute_hull(&order);
        ps.lex = order;
        Ok(ps)
    }

    /// Exact collinearity scan. Small sets use the plain triple loop; larger
    /// ones an angular sort per point (same result, `O(n^2 log n)`).
    pub fn check_general_position(&self) -> Result<(), PointSetError> {
        let res = if self.len() <= 60 {
            general_position(&self.points)
        } else {
            self.general_position_sorted()
        };
        res.map_err(|(a, b, c)| PointSetError::Collinear(a, b, c))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    /// Approximate coordinates, for rendering and heuristics that never decide
    /// a predicate.
    pub fn approx(&self, i: usize) -> (f64, f64) {
        self.approx[i]
    }

    /// Indices sorted lexicographically by `(x, y)`.
    pub fn lex_order(&self) -> &[usize] {
        &self.lex
    }

    /// Convex hull vertices in counterclockwise order, starting from the
    /// lexicographically smallest point.
    pub fn hull(&self) -> &[usize] {
        &self.hull
    }

    pub fn hull_size(&self) -> usize {
        self.hull.len()
    }

    /// Number of edges of every triangulation: `3n - h - 3`.
    pub fn triangulation_edge_count(&self) -> usize {
        3 * self.len() - self.hull_size() - 3
    }

    pub fn orient(&self, a: usize, b: usize, c: usize) -> Orientation {
        if let Some(o) = self.orient_filtered(a, b, c) {
            return o;
        }
        orient_h(&self.hom[a], &self.hom[b], &self.hom[c])
    }

    /// Floating-point orientation with a forward error bound; `None` when the
    /// bound cannot certify the sign.
    fn orient_filtered(&self, a: usize, b: usize, c: usize) -> Option<Orientation> {
        const U: f64 = 1.0 / 9007199254740992.0;
        let (ax, ay) = self.approx[a];
        let (bx, by) = self.approx[b];
        let (cx, cy) = self.approx[c];
        let m = ax.abs().max(ay.abs()).max(bx.abs()).max(by.abs()).max(cx.abs()).max(cy.abs());
        if !m.is_finite() || m > 1e100 {
            return None;
        }
        let (d1, d2, d3, d4) = (bx - ax, cy - ay, by - ay, cx - ax);
        let det = d1 * d2 - d3 * d4;
        let dmax = d1.abs().max(d2.abs()).max(d3.abs()).max(d4.abs());
        // each difference is off by at most delta (conversion and rounding)
        let delta = 8.0 * U * m + U * dmax;
        let bound = 2.0 * (4.0 * dmax * delta + 2.0 * delta * delta + 3.0 * U * (d1 * d2).abs().max((d3 * d4).abs()) * 2.0);
        if det > bound {
            Some(Orientation::Left)
        } else if det < -bound {
            Some(Orientation::Right)
        } else {
            None
        }
    }

    /// Orientation of an arbitrary point against two indexed points.
    pub fn orient_point(&self, a: usize, b: usize, p: &Point) -> Orientation {
        orient_h(&self.hom[a], &self.hom[b], &HPoint::from_point(p))
    }

    pub(crate) fn hom(&self, i: usize) -> &HPoint {
        &self.hom[i]
    }

    /// Proper crossing of segments `ab` and `cd` given by indices.
    pub fn cross(&self, a: usize, b: usize, c: usize, d: usize) -> bool {
        if a == c || a == d || b == c || b == d {
            return false;
        }
        let o1 = self.orient(a, b, c);
        let o2 = self.orient(a, b, d);
        if o1 == Orientation::Collinear || o2 == Orientation::Collinear || o1 == o2 {
            return false;
        }
        let o3 = self.orient(c, d, a);
        let o4 = self.orient(c, d, b);
        o3 != Orientation::Collinear && o4 != Orientation::Collinear && o3 != o4
    }

    /// True if `p` lies strictly inside triangle `abc` (any orientation).
    pub fn in_triangle(&self, a: usize, b: usize, c: usize, p: usize) -> bool {
        let o = self.orient(a, b, c);
        o != Orientation::Collinear
            && self.orient(a, b, p) == o
            && self.orient(b, c, p) == o
            && self.orient(c, a, p) == o
    }

    /// Strict convexity of the quadrilateral `a b c d` taken in this cyclic order.
    pub fn convex_quad(&self, a: usize, b: usize, c: usize, d: usize) -> bool {
        let o = self.orient(a, b, c);
        o != Orientation::Collinear
            && self.orient(b, c, d) == o
            && self.orient(c, d, a) == o
            && self.orient(d, a, b) == o
    }

    fn compute_hull(&self, sorted: &[usize]) -> Vec<usize> {
        // Andrew's monotone chain on the lexicographic order.
        let mut lower: Vec<usize> = Vec::new();
        for &i in sorted {
            while lower.len() >= 2
                && self.orient(lower[lower.len() - 2], lower[lower.len() - 1], i)
                    != Orientation::Left
            {
                lower.pop();
            }
            lower.push(i);
        }
        let mut upper: Vec<usize> = Vec::new();
        for &i in sorted.iter().rev() {
            while upper.len() >= 2
                && self.orient(upper[upper.len() - 2], upper[upper.len() - 1], i)
                    != Orientation::Left
            {
                upper.pop();
            }
            upper.push(i);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        lower
    }

    /// Exact direction from `i` to `j`, flipped into the half-plane
    /// `dy > 0 or (dy == 0 and dx > 0)`, scaled by `w_i w_j > 0`.
    fn half_direction(&self, i: usize, j: usize) -> (BigInt, BigInt) {
        let a = &self.hom[i];
        let b = &self.hom[j];
        let mut dx = &b.x * &a.w - &a.x * &b.w;
        let mut dy = &b.y * &a.w - &a.y * &b.w;
        if dy.is_negative() || (dy.is_zero() && dx.is_negative()) {
            dx = -dx;
            dy = -dy;
        }
        (dx, dy)
    }

    /// Lexicographically first collinear triple via one angular sort per
    /// point. Angles are first compared in floating point with a certified
    /// error bound; any pair the bound cannot separate is decided exactly.
    fn general_position_sorted(&self) -> Result<(), (usize, usize, usize)> {
        let n = self.len();
        // f64 rounding unit; the slack factor covers conversion, subtraction
        // and atan2 error with a wide margin.
        const U: f64 = 1.0 / 9007199254740992.0;
        let mut items: Vec<(f64, f64, usize)> = Vec::with_capacity(n);
        for i in 0..n {
            items.clear();
            let (xi, yi) = self.approx[i];
            for j in i + 1..n {
                let (xj, yj) = self.approx[j];
                let mut dx = xj - xi;
                let mut dy = yj - yi;
                let abs_err = 8.0 * U * (xi.abs() + xj.abs() + yi.abs() + yj.abs());
                let len = dx.abs().max(dy.abs());
                if len <= 1e6 * abs_err {
                    // cancellation: recompute the difference from exact data
                    let (ex, ey) = self.half_direction(i, j);
                    let (fx, fy) = scaled_pair_to_f64(&ex, &ey);
                    dx = fx;
                    dy = fy;
                    let ang = dy.atan2(dx);
                    items.push((ang, 16.0 * U + 1e-300, j));
                    continue;
                }
                if dy < 0.0 || (dy == 0.0 && dx < 0.0) {
                    dx = -dx;
                    dy = -dy;
                }
                let ang = dy.atan2(dx);
                let err = 4.0 * abs_err / len + 16.0 * U;
                items.push((ang, err, j));
            }
            if let Some((j, k)) = self.first_parallel_pair(i, &mut items) {
                return Err((i, j, k));
            }
        }
        Ok(())
    }

    /// Among directions from `i`, the lexicographically smallest pair `(j, k)`
    /// with exactly parallel directions.
    fn first_parallel_pair(&self, i: usize, items: &mut [(f64, f64, usize)]) -> Option<(usize, usize)> {
        items.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
        let pi = std::f64::consts::PI;
        let mut best: Option<(usize, usize)> = None;
        let consider = |group: &[usize], best: &mut Option<(usize, usize)>| {
            if group.len() < 2 {
                return;
            }
            let mut g: Vec<(usize, (BigInt, BigInt))> = group
                .iter()
                .map(|&j| (j, self.half_direction(i, j)))
                .collect();
            g.sort_by(|a, b| cmp_dir(&a.1, &b.1).then(a.0.cmp(&b.0)));
            let mut s = 0;
            while s < g.len() {
                let mut e = s + 1;
                while e < g.len() && cmp_dir(&g[s].1, &g[e].1) == Ordering::Equal {
                    e += 1;
                }
                if e - s >= 2 {
                    let mut idx: Vec<usize> = g[s..e].iter().map(|t| t.0).collect();
                    idx.sort_unstable();
                    let cand = (idx[0], idx[1]);
                    if best.is_none_or(|b| cand < b) {
                        *best = Some(cand);
                    }
                }
                s = e;
            }
        };
        // groups of mutually overlapping intervals
        let mut start = 0;
        let mut reach = f64::NEG_INFINITY;
        let mut boundary: Vec<usize> = Vec::new();
        for (pos, it) in items.iter().enumerate() {
            if it.0 - it.1 <= 0.0 || it.0 + it.1 >= pi {
                boundary.push(it.2);
            }
            if pos > start && it.0 - it.1 > reach {
                let group: Vec<usize> = items[start..pos].iter().map(|t| t.2).collect();
                consider(&group, &mut best);
                start = pos;
                reach = f64::NEG_INFINITY;
            }
            reach = reach.max(it.0 + it.1);
        }
        let group: Vec<usize> = items[start..].iter().map(|t| t.2).collect();
        consider(&group, &mut best);
        consider(&boundary, &mut best);
        best
    }
}

fn cmp_dir(a: &(BigInt, BigInt), b: &(BigInt, BigInt)) -> Ordering {
    // both in the upper half-plane; a before b iff cross(a, b) > 0
    let c = &a.0 * &b.1 - &a.1 * &b.0;
    match c.sign() {
        Sign::Plus => Ordering::Less,
        Sign::Minus => Ordering::Greater,
        Sign::NoSign => Ordering::Equal,
    }
}

/// Converts a big-integer direction to floats after a common shift, which
/// keeps the ratio accurate to a few ulps.
fn scaled_pair_to_f64(x: &BigInt, y: &BigInt) -> (f64, f64) {
    let bits = x.bits().max(y.bits());
    let shift = bits.saturating_sub(900) as usize;
    let xs: BigInt = x >> shift;
    let ys: BigInt = y >> shift;
    (xs.to_f64().unwrap_or(0.0), ys.to_f64().unwrap_or(0.0))
}
