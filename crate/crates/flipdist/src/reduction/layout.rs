//! Convex embedding of the graph, the straight-line drawing, and the
//! clearance `delta` that sizes every gadget.

use super::graph::CubicGraph;
use super::ReductionError;
use crate::geometry::{orientation, qi, unit_circle_point, Orientation, Point, Rational};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// `n` points on the unit circle with parameters `t = i / n^5` in `(0, 1]`,
/// spread evenly over the quarter circle; each is the candidate nearest to
/// its target that keeps every three diagonals non-concurrent.
pub fn embed_polygon(n: usize) -> Result<Vec<Point>, ReductionError> {
    if n < 3 {
        return Err(ReductionError::Layout(format!("need at least 3 vertices, got {n}")));
    }
    let big = (n as u64).pow(5);
    let mut chosen: Vec<Point> = Vec::with_capacity(n);
    let mut used: Vec<u64> = Vec::with_capacity(n);
    for k in 0..n as u64 {
        let target = (k + 1) * big / n as u64;
        let pick = nearest_valid(target, big, &used, |t| admissible(&chosen, t))
            .ok_or_else(|| ReductionError::Layout(format!("no admissible candidate for vertex {k}")))?;
        used.push(pick);
        chosen.push(candidate(pick, big));
    }
    // keep counterclockwise order (ascending parameter)
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| used[i]);
    Ok(order.into_iter().map(|i| chosen[i].clone()).collect())
}

fn candidate(i: u64, big: u64) -> Point {
    unit_circle_point(&Rational::new(BigInt::from(i), BigInt::from(big)))
}

fn nearest_valid<F: Fn(&Point) -> bool>(target: u64, big: u64, used: &[u64], ok: F) -> Option<u64> {
    for off in 0..big {
        for i in [target.checked_sub(off), target.checked_add(off)].into_iter().flatten() {
            if i == 0 || i > big || used.contains(&i) {
                continue;
            }
            if ok(&candidate(i, big)) {
                return Some(i);
            }
            if off == 0 {
                break;
            }
        }
    }
    None
}

/// No chord from `c` passes through a crossing of two chords of `chosen`.
fn admissible(chosen: &[Point], c: &Point) -> bool {
    let m = chosen.len();
    if m < 4 {
        return true;
    }
    for a in 0..m {
        for b in a + 1..m {
            for cc in b + 1..m {
                for d in cc + 1..m {
                    // in convex position only the pairing (a,cc)-(b,d) crosses,
                    // whatever the angular order; find it by trying all three
                    let x = match crossing_of_four(chosen, [a, b, cc, d]) {
                        Some(x) => x,
                        None => continue,
                    };
                    for s in 0..m {
                        if [a, b, cc, d].contains(&s) {
                            continue;
                        }
                        if orientation(c, &chosen[s], &x) == Orientation::Collinear {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

fn crossing_of_four(p: &[Point], idx: [usize; 4]) -> Option<Point> {
    let [a, b, c, d] = idx;
    for (s1, s2) in [((a, b), (c, d)), ((a, c), (b, d)), ((a, d), (b, c))] {
        if crate::geometry::segments_properly_cross((&p[s1.0], &p[s1.1]), (&p[s2.0], &p[s2.1])) {
            return line_intersection(&p[s1.0], &p[s1.1], &p[s2.0], &p[s2.1]);
        }
    }
    None
}

/// Intersection of the lines `ab` and `cd`; `None` if parallel.
pub fn line_intersection(a: &Point, b: &Point, c: &Point, d: &Point) -> Option<Point> {
    let (rx, ry) = b.sub(a);
    let (sx, sy) = d.sub(c);
    let den = &rx * &sy - &ry * &sx;
    if den.is_zero() {
        return None;
    }
    let (qx, qy) = c.sub(a);
    let t = (&qx * &sy - &qy * &sx) / den;
    Some(a.offset(&rx, &ry, &t))
}

/// Parameter of the orthogonal projection of `p` onto the line `a -> b`.
pub fn projection_param(a: &Point, b: &Point, p: &Point) -> Rational {
    let (dx, dy) = b.sub(a);
    let (px, py) = p.sub(a);
    (&px * &dx + &py * &dy) / (&dx * &dx + &dy * &dy)
}

/// Closest point to `p` on the segment `ab`.
pub fn closest_on_segment(a: &Point, b: &Point, p: &Point) -> Point {
    let t = projection_param(a, b, p);
    let t = if t.is_negative() {
        Rational::zero()
    } else if t > qi(1) {
        qi(1)
    } else {
        t
    };
    let (dx, dy) = b.sub(a);
    a.offset(&dx, &dy, &t)
}

/// Larger of the two coordinate gaps: a rational lower bound on the distance.
pub fn axis_gap(a: &Point, b: &Point) -> Rational {
    let dx = (&a.x - &b.x).abs();
    let dy = (&a.y - &b.y).abs();
    if dx > dy {
        dx
    } else {
        dy
    }
}

/// Squared distance from `p` to the segment `ab`.
pub fn dist2_to_segment(a: &Point, b: &Point, p: &Point) -> Rational {
    closest_on_segment(a, b, p).dist2(p)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clearances {
    /// Crossing-to-chord clearance.
    pub delta_e: Rational,
    /// Vertex-to-neighbour-chord clearance.
    pub delta_v: Rational,
    /// Neighbour-to-normal-line clearance.
    pub delta_n: Rational,
    /// Smallest coordinate gap between two vertices.
    pub delta_r: Rational,
    pub delta: Rational,
    pub r_v: Rational,
}

/// Axis-distance clearances of the complete drawing on `polygon` and the
/// resulting `delta = min(delta_e / 3, delta_v, delta_n, delta_r)`, `r_V = delta / 6`.
pub fn compute_clearances(polygon: &[Point]) -> Result<Clearances, ReductionError> {
    let n = polygon.len();
    if n < 3 {
        return Err(ReductionError::Layout("clearances need a polygon".into()));
    }
    let mut segs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            segs.push((a, b));
        }
    }
    let mut delta_e: Option<Rational> = None;
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            let (s1, s2) = (segs[i], segs[j]);
            if s1.0 == s2.0 || s1.0 == s2.1 || s1.1 == s2.0 || s1.1 == s2.1 {
                continue;
            }
            let (a, b, c, d) = (&polygon[s1.0], &polygon[s1.1], &polygon[s2.0], &polygon[s2.1]);
            if !crate::geometry::segments_properly_cross((a, b), (c, d)) {
                continue;
            }
            let x = line_intersection(a, b, c, d).expect("crossing segments are not parallel");
            for (k, s) in segs.iter().enumerate() {
                if k == i || k == j {
                    continue;
                }
                let cp = closest_on_segment(&polygon[s.0], &polygon[s.1], &x);
                min_into(&mut delta_e, axis_gap(&x, &cp));
            }
        }
    }
    let mut delta_v: Option<Rational> = None;
    let mut delta_n: Option<Rational> = None;
    for k in 0..n {
        let u = &polygon[(k + n - 1) % n];
        let v = &polygon[k];
        let w = &polygon[(k + 1) % n];
        let t = projection_param(u, w, v);
        let (dx, dy) = w.sub(u);
        min_into(&mut delta_v, axis_gap(v, &u.offset(&dx, &dy, &t)));
        let normal_end = Point::new(&v.x - &v.y, &v.y + &v.x);
        for nb in [u, w] {
            let t = projection_param(v, &normal_end, nb);
            let foot = v.offset(&-&v.y, &v.x, &t);
            min_into(&mut delta_n, axis_gap(nb, &foot));
        }
    }
    let mut delta_r: Option<Rational> = None;
    for a in 0..n {
        for b in a + 1..n {
            let dx = (&polygon[a].x - &polygon[b].x).abs();
            let dy = (&polygon[a].y - &polygon[b].y).abs();
            min_into(&mut delta_r, if dx < dy { dx } else { dy });
        }
    }
    // a polygon without crossings (n = 3) imposes no crossing clearance
    let delta_r = delta_r.expect("n >= 3");
    let delta_v = delta_v.expect("n >= 3");
    let delta_n = delta_n.expect("n >= 3");
    let delta_e = delta_e.unwrap_or_else(|| &delta_r * qi(3));
    let mut delta = &delta_e / qi(3);
    for c in [&delta_v, &delta_n, &delta_r] {
        if *c < delta {
            delta = c.clone();
        }
    }
    if !delta.is_positive() {
        return Err(ReductionError::Layout("degenerate polygon: zero clearance".into()));
    }
    let r_v = &delta / qi(6);
    Ok(Clearances {
        delta_e,
        delta_v,
        delta_n,
        delta_r,
        delta,
        r_v,
    })
}

fn min_into(slot: &mut Option<Rational>, v: Rational) {
    match slot {
        Some(cur) if *cur <= v => {}
        _ => *slot = Some(v),
    }
}

/// A crossing between two drawn graph edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DrawnCrossing {
    pub e: usize,
    pub f: usize,
    pub point: Point,
}

/// Straight-line drawing of `g` on the polygon: pairwise edge crossings and
/// the per-edge crossing count.
#[derive(Debug, Clone)]
pub struct Drawing {
    pub crossings: Vec<DrawnCrossing>,
    pub per_edge: Vec<usize>,
}

impl Drawing {
    pub fn new(g: &CubicGraph, polygon: &[Point]) -> Self {
        let e = g.edges();
        let mut crossings = Vec::new();
        let mut per_edge = vec![0; e.len()];
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                let (a, b) = e[i];
                let (c, d) = e[j];
                if a == c || a == d || b == c || b == d {
                    continue;
                }
                let (pa, pb, pc, pd) = (&polygon[a], &polygon[b], &polygon[c], &polygon[d]);
                if crate::geometry::segments_properly_cross((pa, pb), (pc, pd)) {
                    let point = line_intersection(pa, pb, pc, pd).expect("crossing segments");
                    crossings.push(DrawnCrossing { e: i, f: j, point });
                    per_edge[i] += 1;
                    per_edge[j] += 1;
                }
            }
        }
        Drawing { crossings, per_edge }
    }

    /// Largest number of crossings on one edge.
    pub fn max_crossings(&self) -> usize {
        self.per_edge.iter().copied().max().unwrap_or(0)
    }
}

/// Largest denominator allowed for polygon coordinates: `2 n^10`.
pub fn polygon_denominator_cap(n: usize) -> BigInt {
    BigInt::from(2u32) * BigInt::from(n as u64).pow(10)
}

/// Exact check that the circles of radius `r` around `centers` keep a gap of
/// at least `4 r`, and that no circle meets the hull of two others.
pub fn circles_separated(centers: &[Point], r: &Rational) -> Result<(), String> {
    let six = (r * qi(6)) * (r * qi(6));
    let two = (r * qi(2)) * (r * qi(2));
    for a in 0..centers.len() {
        for b in a + 1..centers.len() {
            if centers[a].dist2(&centers[b]) < six {
                return Err(format!("circles {a} and {b} are closer than 4 r_V"));
            }
        }
    }
    for v in 0..centers.len() {
        for a in 0..centers.len() {
            for b in a + 1..centers.len() {
                if v == a || v == b {
                    continue;
                }
                if dist2_to_segment(&centers[a], &centers[b], &centers[v]) <= two {
                    return Err(format!("circle {v} meets the hull of circles {a} and {b}"));
                }
            }
        }
    }
    Ok(())
}
