//! Tunnel endpoints: two rational points on each wire circle per incident
//! edge, aimed at the short vertical spokes above and below the far vertex.

use super::certificate::CollinearityGuard;
use super::param::{rational_in_interval, Family, Ortho};
use super::ReductionError;
use crate::geometry::{orientation, q, qi, Orientation, Point, Rational};
use num_bigint::BigInt;
use num_traits::Signed;
use std::cmp::Ordering;

type Dir = (Rational, Rational);

fn cross(a: &Dir, b: &Dir) -> Rational {
    &a.0 * &b.1 - &a.1 * &b.0
}

/// Position of `d` relative to the wedge from `cw` counterclockwise to `ccw`
/// (narrower than a half-turn): `Less` if clockwise of it, `Greater` if
/// counterclockwise, `Equal` strictly inside.
pub fn angular_classify(d: &Dir, cw: &Dir, ccw: &Dir) -> Ordering {
    if !cross(cw, d).is_positive() {
        Ordering::Less
    } else if !cross(d, ccw).is_positive() {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}

/// Quarter turn `R` such that `R^-1 dir` has local angle in `[45, 135]` degrees.
pub fn circle_frame(dir: &Dir) -> Ortho {
    for k in 0..4u8 {
        let r = Ortho::rotation(k);
        let (a, b) = r.inverse().apply((&dir.0, &dir.1));
        if b >= a.abs() {
            return r;
        }
    }
    unreachable!("the four quarter turns cover every direction")
}

/// Number of candidates per tunnel endpoint: more than twice the number of
/// lines through two of the at most `7n` exceptional points placed so far.
pub fn candidate_count(n: usize) -> usize {
    let k = 7 * n;
    k * (k - 1) + 1
}

/// The four corners of one tunnel, `v` the endpoint with smaller x.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TunnelPorts {
    pub p_v: Point,
    pub q_v: Point,
    pub q_w: Point,
    pub p_w: Point,
}

impl TunnelPorts {
    pub fn as_array(&self) -> [&Point; 4] {
        [&self.p_v, &self.q_v, &self.q_w, &self.p_w]
    }
}

/// Point on the circle of radius `r` around `center` whose direction from
/// `center` hits the spoke above (`sign > 0`) or below `toward`.
fn place_port(
    center: &Point,
    r: &Rational,
    toward: &Point,
    sign: i64,
    candidates: usize,
    guard: &CollinearityGuard,
    cap_mult: u32,
) -> Result<Point, ReductionError> {
    let dir = |h: &Rational| -> Dir { (&toward.x - &center.x, &toward.y + qi(sign) * h * r - &center.y) };
    let wedge = |h1: Rational, h2: Rational| -> (Dir, Dir) {
        let (a, b) = (dir(&h1), dir(&h2));
        if cross(&a, &b).is_positive() {
            (a, b)
        } else {
            (b, a)
        }
    };
    let frame = circle_frame(&dir(&q(3, 4)));
    let fam = Family::unit_circle(center, r, frame);
    let classify_in = |w: &(Dir, Dir)| {
        let w = w.clone();
        let fam = fam.clone();
        let center = center.clone();
        move |t: &Rational| {
            let p = fam.point(t);
            angular_classify(&p.sub(&center), &w.0, &w.1)
        }
    };
    let lo_wedge = wedge(q(1, 2), q(5, 8));
    let hi_wedge = wedge(q(7, 8), qi(1));
    let (a, b) = (q(1, 4), qi(4));
    let ta = rational_in_interval(&a, &b, classify_in(&lo_wedge), cap_mult)?;
    let tb = rational_in_interval(&a, &b, classify_in(&hi_wedge), cap_mult)?;
    let (lo, hi) = if ta < tb { (ta, tb) } else { (tb, ta) };
    let span = &hi - &lo;
    let den = Rational::from_integer(BigInt::from(candidates as u64 + 1));
    let mid = candidates.div_ceil(2);
    for off in 0..candidates {
        // middle outward: mid, mid + 1, mid - 1, ...
        let i = if off % 2 == 0 { mid + off / 2 } else { mid.wrapping_sub(off / 2 + 1) };
        if i == 0 || i > candidates {
            continue;
        }
        let t = &lo + &span * Rational::from_integer(BigInt::from(i as u64)) / &den;
        let p = fam.point(&t);
        if guard.admits(&p) {
            return Ok(p);
        }
    }
    Err(ReductionError::TunnelTooCrowded(format!("no admissible endpoint on the circle at {center}")))
}

/// Places the four endpoints of the tunnel between `v` and `w` (with
/// `x_v < x_w`) and records them in `guard`.
pub fn build_tunnel(
    v: &Point,
    w: &Point,
    r: &Rational,
    candidates: usize,
    guard: &mut CollinearityGuard,
    cap_mult: u32,
) -> Result<TunnelPorts, ReductionError> {
    if v.x >= w.x {
        return Err(ReductionError::Layout("tunnel endpoints must be ordered by x".into()));
    }
    let place = |c: &Point, t: &Point, s: i64, g: &mut CollinearityGuard| -> Result<Point, ReductionError> {
        let p = place_port(c, r, t, s, candidates, g, cap_mult)?;
        g.push(&p);
        Ok(p)
    };
    let p_v = place(v, w, 1, guard)?;
    let p_w = place(w, v, 1, guard)?;
    let q_v = place(v, w, -1, guard)?;
    let q_w = place(w, v, -1, guard)?;
    let t = TunnelPorts { p_v, q_v, q_w, p_w };
    check_tunnel(v, w, &t)?;
    Ok(t)
}

/// `p_v v w p_w` and `q_v v w q_w` are convex, and the tunnel sides do not cross.
pub fn check_tunnel(v: &Point, w: &Point, t: &TunnelPorts) -> Result<(), ReductionError> {
    let bad = |m: &str| Err(ReductionError::invariant("tunnel", format!("{m} for tunnel {v} -- {w}")));
    if orientation(v, &t.p_w, &t.p_v) != Orientation::Left || orientation(w, &t.p_v, &t.p_w) != Orientation::Right {
        return bad("upper side is not convex");
    }
    if orientation(v, &t.q_w, &t.q_v) != Orientation::Right || orientation(w, &t.q_v, &t.q_w) != Orientation::Left {
        return bad("lower side is not convex");
    }
    if orientation(&t.q_v, &t.q_w, &t.p_w) != Orientation::Left || orientation(&t.q_v, &t.q_w, &t.p_v) != Orientation::Left {
        return bad("upper side is not above the lower side");
    }
    if orientation(&t.p_v, &t.p_w, &t.q_v) != Orientation::Right || orientation(&t.p_v, &t.p_w, &t.q_w) != Orientation::Right {
        return bad("lower side is not below the upper side");
    }
    Ok(())
}

/// Tunnels sharing a wire center do not cross each other. `sides` lists
/// `(side start, side end)` per tunnel side leaving that center.
pub fn check_disjoint_at_center(sides: &[(Point, Point)]) -> Result<(), ReductionError> {
    for i in 0..sides.len() {
        for j in i + 1..sides.len() {
            let (a, b) = (&sides[i], &sides[j]);
            if crate::geometry::segments_properly_cross((&a.0, &a.1), (&b.0, &b.1)) {
                return Err(ReductionError::invariant("tunnel", "tunnels at one wire center cross"));
            }
        }
    }
    Ok(())
}

