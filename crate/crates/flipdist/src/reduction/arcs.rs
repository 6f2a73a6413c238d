//! Circular arcs inside a tunnel side, their secant parametrization, and
//! the interval of the tunnel reserved for the edge center.

use super::layout::projection_param;
use super::param::{rational_in_interval, Family, Ortho};
use super::ReductionError;
use crate::geometry::{q, qi, Point, Rational};
use num_traits::{Signed, Zero};
use std::cmp::Ordering;

type Dir = (Rational, Rational);

fn cross(a: &Dir, b: &Dir) -> Rational {
    &a.0 * &b.1 - &a.1 * &b.0
}

fn dot(a: &Dir, b: &Dir) -> Rational {
    &a.0 * &b.0 + &a.1 * &b.1
}

/// `angle(d, a) < angle(d, b)` for directions within a quarter turn of `d`.
fn angle_less(d: &Dir, a: &Dir, b: &Dir) -> bool {
    cross(d, a).abs() * dot(d, b) < cross(d, b).abs() * dot(d, a)
}

const OCTANTS: [(i64, i64); 8] = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];

fn oct(k: usize) -> Dir {
    let (x, y) = OCTANTS[k % 8];
    (qi(x), qi(y))
}

/// Arc through both endpoints of a tunnel side, bent into the tunnel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcDesc {
    /// Endpoint where the arc is tangent to the chosen ray.
    pub q: Point,
    pub q_other: Point,
    pub center: Point,
    pub radius2: Rational,
    /// Maps local slopes in `(0, 1)` to the octant holding the arc.
    pub frame: Ortho,
    pub m_chord: Rational,
    pub m_tan: Rational,
    /// Second intersections of lines through `q`, by local slope.
    pub family: Family,
}

impl ArcDesc {
    /// Arc over the side `a b`; `far_a` is the wire center at the `b` end
    /// (seen from `a`) and `far_b` the one at the `a` end.
    pub fn new(a: &Point, b: &Point, far_a: &Point, far_b: &Point) -> Result<ArcDesc, ReductionError> {
        let (wa, wb) = (far_a.sub(a), far_b.sub(b));
        let (da, db) = (b.sub(a), a.sub(b));
        // tan of the angle at a is not larger than at b
        let a_first = cross(&da, &wa).abs() * dot(&db, &wb) <= cross(&db, &wb).abs() * dot(&da, &wa);
        let (q, q2, far, d) = if a_first { (a, b, far_a, da) } else { (b, a, far_b, db) };
        let wd = far.sub(q);
        let turn = cross(&d, &wd);
        if turn.is_zero() || !dot(&d, &wd).is_positive() {
            return Err(ReductionError::Layout("far wire center is not beside the tunnel side".into()));
        }
        let ccw = turn.is_positive();
        // first octant direction strictly past the chord, towards the interior
        let mut pick = None;
        for k in 0..8 {
            let (prev, r) = if ccw { (oct(k + 7), oct(k)) } else { (oct(k + 1), oct(k)) };
            let before = if ccw { cross(&prev, &d) } else { cross(&d, &prev) };
            let after = if ccw { cross(&d, &r) } else { cross(&r, &d) };
            if !before.is_negative() && after.is_positive() && dot(&prev, &d).is_positive() {
                pick = Some((prev, r));
                break;
            }
        }
        let (r_prev, r) = pick.expect("some octant contains the chord");
        let s = if angle_less(&d, &wd, &r) { wd } else { r.clone() };
        let mut n = (-s.1.clone(), s.0.clone());
        if dot(&n, &d).is_negative() {
            n = (-n.0, -n.1);
        }
        let mu = dot(&d, &d) / (qi(2) * dot(&n, &d));
        let center = q.offset(&n.0, &n.1, &mu);
        let radius2 = center.dist2(q);
        // T(1,0) is the axis direction of the octant, T(1,1) its diagonal
        let is_axis = |v: &Dir| v.0.is_zero() || v.1.is_zero();
        let (axis, diag) = if is_axis(&r_prev) { (&r_prev, &r) } else { (&r, &r_prev) };
        let perp = (&diag.0 - &axis.0, &diag.1 - &axis.1);
        let to_i8 = |x: &Rational| -> i8 {
            if x.is_positive() {
                1
            } else if x.is_negative() {
                -1
            } else {
                0
            }
        };
        let frame = Ortho {
            a: to_i8(&axis.0),
            b: to_i8(&perp.0),
            c: to_i8(&axis.1),
            d: to_i8(&perp.1),
        };
        let slope = |v: &Dir| -> Rational {
            let (x, y) = frame.inverse().apply((&v.0, &v.1));
            y / x
        };
        let m_chord = slope(&d);
        let m_tan = slope(&s);
        let family = Family::secant(q, &center, frame);
        Ok(ArcDesc {
            q: q.clone(),
            q_other: q2.clone(),
            center,
            radius2,
            frame,
            m_chord,
            m_tan,
            family,
        })
    }

    pub fn point(&self, m: &Rational) -> Point {
        self.family.point(m)
    }

    /// Open slope interval whose points lie on the arc strictly between its endpoints.
    pub fn slope_interval(&self) -> (Rational, Rational) {
        if self.m_chord < self.m_tan {
            (self.m_chord.clone(), self.m_tan.clone())
        } else {
            (self.m_tan.clone(), self.m_chord.clone())
        }
    }

    /// Strictly inside the disk bounded by the arc's circle.
    pub fn strictly_inside(&self, p: &Point) -> bool {
        self.center.dist2(p) < self.radius2
    }

    /// Slope whose arc point projects onto `line` with parameter strictly
    /// inside `(lo, hi)`.
    pub fn slope_for(
        &self,
        line: (&Point, &Point),
        lo: &Rational,
        hi: &Rational,
        cap_mult: u32,
    ) -> Result<Rational, ReductionError> {
        let (a, b) = self.slope_interval();
        let lam = |m: &Rational| projection_param(line.0, line.1, &self.point(m));
        let span = &b - &a;
        let increasing = lam(&(&a + &span * q(1, 3))) < lam(&(&a + &span * q(2, 3)));
        let classify = |m: &Rational| -> Ordering {
            let l = lam(m);
            let c = if l <= *lo {
                Ordering::Less
            } else if l >= *hi {
                Ordering::Greater
            } else {
                Ordering::Equal
            };
            if increasing {
                c
            } else {
                c.reverse()
            }
        };
        rational_in_interval(&a, &b, classify, cap_mult)
    }
}

/// The parameter range along `v -> w` reserved for the edge center: gap
/// `floor(k / 2)` among the `k` crossing intervals (sorted), bounded by the
/// tunnel mouths at the ends, and shrunk by a quarter on both sides.
pub fn center_gap(
    crossings: &[(Rational, Rational)],
    mouth_v: &Rational,
    mouth_w: &Rational,
) -> Result<(Rational, Rational), ReductionError> {
    let k = crossings.len();
    let g = k / 2;
    let lo = if g == 0 { mouth_v.clone() } else { crossings[g - 1].1.clone() };
    let hi = if g == k { mouth_w.clone() } else { crossings[g].0.clone() };
    if lo >= hi {
        return Err(ReductionError::Layout("crossing intervals overlap the edge center".into()));
    }
    let quarter = (&hi - &lo) / qi(4);
    Ok((&lo + &quarter, &hi - &quarter))
}

/// Slope brackets for the chain points: one slope projecting into the
/// first eighth of `gap`, one into the last eighth.
pub fn chain_brackets(
    arc: &ArcDesc,
    line: (&Point, &Point),
    gap: &(Rational, Rational),
    cap_mult: u32,
) -> Result<(Rational, Rational), ReductionError> {
    let eighth = (&gap.1 - &gap.0) / qi(8);
    let first = arc.slope_for(line, &gap.0, &(&gap.0 + &eighth), cap_mult)?;
    let last = arc.slope_for(line, &(&gap.1 - &eighth), &gap.1, cap_mult)?;
    Ok(if first < last { (first, last) } else { (last, first) })
}
