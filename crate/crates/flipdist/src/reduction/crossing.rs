//! Crossing quadrilaterals: one point near each intersection of two tunnel
//! sides, pushed into both tunnels.

use super::arcs::ArcDesc;
use super::certificate::CollinearityGuard;
use super::layout::{line_intersection, projection_param};
use super::ReductionError;
use crate::geometry::{orientation, q, Orientation, Point, Rational};
use num_bigint::BigInt;

/// One tunnel as seen by the crossing placement.
#[derive(Debug, Clone)]
pub struct TunnelView<'a> {
    /// Graph endpoints `v`, `w`.
    pub ends: (&'a Point, &'a Point),
    /// Upper side `p_v -> p_w`, lower side `q_v -> q_w`.
    pub sides: [(&'a Point, &'a Point); 2],
    pub arcs: &'a [ArcDesc; 2],
}

impl TunnelView<'_> {
    fn strictly_inside(&self, x: &Point) -> bool {
        let [(pv, pw), (qv, qw)] = self.sides;
        orientation(pv, pw, x) == Orientation::Right && orientation(qv, qw, x) == Orientation::Left
    }
}

/// Unperturbed corners of the crossing of tunnels `e` and `f`:
/// `corners[a][b]` lies on side `a` of `e` and side `b` of `f`.
pub fn raw_corners(e: &TunnelView, f: &TunnelView) -> Result<[[Point; 2]; 2], ReductionError> {
    let x = |a: usize, b: usize| {
        let (s, t) = (e.sides[a], f.sides[b]);
        line_intersection(s.0, s.1, t.0, t.1).ok_or_else(|| ReductionError::Layout("parallel tunnel sides".into()))
    };
    Ok([[x(0, 0)?, x(0, 1)?], [x(1, 0)?, x(1, 1)?]])
}

/// A placed crossing: corners counterclockwise, with the sides they lie on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacedCrossing {
    pub corners: [Point; 4],
    /// `(side of e, side of f)` per corner.
    pub on: [(usize, usize); 4],
    /// Positions (into `corners`) of the diagonal's endpoints.
    pub diagonal: (usize, usize),
}

/// Separating lines on one tunnel side: from both wire centers through the
/// midpoints between consecutive raw corners on that side.
#[derive(Debug, Clone, Default)]
pub struct SideFences {
    /// Raw corners on the side, by parameter along the tunnel.
    pub corners: Vec<Point>,
}

impl SideFences {
    fn lines_around(&self, c: &Point, ends: (&Point, &Point)) -> Vec<(Point, Point)> {
        let Some(i) = self.corners.iter().position(|x| x == c) else {
            return Vec::new();
        };
        let mut mids = Vec::new();
        if i > 0 {
            mids.push(self.corners[i - 1].midpoint(c));
        }
        if i + 1 < self.corners.len() {
            mids.push(c.midpoint(&self.corners[i + 1]));
        }
        let mut out = Vec::new();
        for m in mids {
            out.push((ends.0.clone(), m.clone()));
            out.push((ends.1.clone(), m));
        }
        out
    }
}

/// Sorts raw corners along `v -> w`.
pub fn sort_along(ends: (&Point, &Point), pts: &mut [Point]) {
    pts.sort_by_cached_key(|p| projection_param(ends.0, ends.1, p));
}

/// Pushes every raw corner of the crossing into both tunnels, away from the
/// fences, and picks candidates admitted by `guard` (which records them).
pub fn place_crossing(
    e: &TunnelView,
    f: &TunnelView,
    fences_e: &[SideFences; 2],
    fences_f: &[SideFences; 2],
    candidates: usize,
    guard: &mut CollinearityGuard,
) -> Result<PlacedCrossing, ReductionError> {
    let raw = raw_corners(e, f)?;
    // cyclic order along the sides: (0,0) (0,1) (1,1) (1,0)
    let cyc = [(0usize, 0usize), (0, 1), (1, 1), (1, 0)];
    let mut placed: Vec<Point> = Vec::with_capacity(4);
    for &(a, b) in &cyc {
        let c = &raw[a][b];
        let ue = raw[a][1 - b].sub(c);
        let uf = raw[1 - a][b].sub(c);
        let mut fences = fences_e[a].lines_around(c, e.ends);
        fences.extend(fences_f[b].lines_around(c, f.ends));
        let fence_sides: Vec<Orientation> = fences.iter().map(|(s, t)| orientation(s, t, c)).collect();
        let ok = |x: &Point| {
            e.strictly_inside(x)
                && f.strictly_inside(x)
                && e.arcs[a].strictly_inside(x)
                && f.arcs[b].strictly_inside(x)
                && fences.iter().zip(&fence_sides).all(|((s, t), o)| orientation(s, t, x) == *o)
        };
        let dirs = [(1i64, 1i64), (2, 1), (1, 2)];
        let mut found = None;
        'dirs: for (ke, kf) in dirs {
            let dx = &ue.0 * Rational::from_integer(ke.into()) + &uf.0 * Rational::from_integer(kf.into());
            let dy = &ue.1 * Rational::from_integer(ke.into()) + &uf.1 * Rational::from_integer(kf.into());
            let mut eps = q(1, 4);
            let mut tries = 0;
            while !ok(&c.offset(&dx, &dy, &eps)) {
                eps /= Rational::from_integer(2.into());
                tries += 1;
                if tries > 256 {
                    continue 'dirs;
                }
            }
            let den = Rational::from_integer(BigInt::from(candidates as u64 + 1));
            let mid = candidates.div_ceil(2);
            for off in 0..candidates {
                let i = if off % 2 == 0 { mid + off / 2 } else { mid.wrapping_sub(off / 2 + 1) };
                if i == 0 || i > candidates {
                    continue;
                }
                let s = &eps * Rational::from_integer(BigInt::from(i as u64)) / &den;
                let x = c.offset(&dx, &dy, &s);
                if guard.admits(&x) {
                    found = Some(x);
                    break 'dirs;
                }
            }
        }
        let x = found.ok_or_else(|| ReductionError::NoCandidate(format!("crossing corner near {c}")))?;
        guard.push(&x);
        placed.push(x);
    }
    let mut corners: [Point; 4] = placed.try_into().expect("four corners");
    let mut on = cyc;
    if orientation(&corners[0], &corners[1], &corners[2]) == Orientation::Right {
        corners.reverse();
        on.reverse();
    }
    let lo = (0..4).min_by(|&i, &j| corners[i].cmp(&corners[j])).expect("four corners");
    Ok(PlacedCrossing {
        corners,
        on,
        diagonal: (lo, (lo + 2) % 4),
    })
}
