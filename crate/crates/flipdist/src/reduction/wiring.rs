//! Wire circles: the parametrization of each circle, the two parameter
//! ranges left free by the tunnel ports, and the zig-zag wiring edges.

use super::param::{grid_parameters_multi, Family, Ortho};
use super::{ReductionError, VertexGadget};
use crate::geometry::{Point, Rational};
use crate::triangulation::Edge;
use num_bigint::BigInt;
use num_traits::{One, Signed};

/// Parametrization of one wire circle and the free parameter ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WiringPlan {
    pub family: Family,
    pub rotation: Ortho,
    /// `(t(N+), first port)`.
    pub left: (Rational, Rational),
    /// `(last port, t(N-))`.
    pub right: (Rational, Rational),
    /// Port indices (into the slice given to [`plan_wiring`]) by increasing parameter.
    pub port_order: Vec<usize>,
}

/// Quarter turn taking local `(-1, 0)` closest to the outward direction `v`.
fn outward_frame(v: &Point) -> Ortho {
    for k in 0..4u8 {
        let r = Ortho::rotation(k);
        let (a, b) = r.inverse().apply((&v.x, &v.y));
        if -&a >= b.abs() {
            return r;
        }
    }
    unreachable!("the four quarter turns cover every direction")
}

/// Parameter of a point on the circle in the frame of `plan`.
fn param_of(center: &Point, rho: &Rational, rot: Ortho, p: &Point) -> Rational {
    let (dx, dy) = p.sub(center);
    let (lx, ly) = rot.inverse().apply((&(dx / rho), &(dy / rho)));
    ly / (Rational::one() + lx)
}

/// Plans the wiring of the vertex at `v` (on the unit circle) with circle
/// radius `rho`, given the tunnel ports on that circle.
pub fn plan_wiring(v: &Point, rho: &Rational, ports: &[Point]) -> Result<WiringPlan, ReductionError> {
    let rot = outward_frame(v);
    let family = Family::unit_circle(v, rho, rot);
    let n_plus = Point::new(&v.x - rho * &v.y, &v.y + rho * &v.x);
    let n_minus = Point::new(&v.x + rho * &v.y, &v.y - rho * &v.x);
    let t_plus = param_of(v, rho, rot, &n_plus);
    let t_minus = param_of(v, rho, rot, &n_minus);
    let mut order: Vec<(Rational, usize)> = ports.iter().enumerate().map(|(i, p)| (param_of(v, rho, rot, p), i)).collect();
    order.sort();
    let (first, last) = match (order.first(), order.last()) {
        (Some(f), Some(l)) => (f.0.clone(), l.0.clone()),
        _ => return Err(ReductionError::Layout("wire circle without ports".into())),
    };
    if !(t_plus < first && last < t_minus) {
        return Err(ReductionError::invariant("wiring", format!("ports of the circle at {v} leave the inner half")));
    }
    Ok(WiringPlan {
        family,
        rotation: rot,
        left: (t_plus, first),
        right: (last, t_minus),
        port_order: order.into_iter().map(|(_, i)| i).collect(),
    })
}

/// `w` parameters in each free range over the common denominator `M`,
/// returned as `(M, l_1..l_w, r_1..r_w)` with `l_1` and `r_1` next to the
/// normal line.
pub fn wiring_parameters(
    plan: &WiringPlan,
    w: usize,
    p: u64,
) -> Result<(BigInt, Vec<BigInt>, Vec<BigInt>), ReductionError> {
    let (m, mut grids) = grid_parameters_multi(
        &[
            (plan.left.0.clone(), plan.left.1.clone(), w),
            (plan.right.0.clone(), plan.right.1.clone(), w),
        ],
        p,
    )?;
    let mut right = grids.pop().expect("two ranges");
    let left = grids.pop().expect("two ranges");
    right.reverse();
    Ok((m, left, right))
}

/// `l_1 r_1, r_1 l_2, l_2 r_2, ..., l_w r_w`.
pub fn zigzag(left: &[usize], right: &[usize]) -> Vec<Edge> {
    let mut out = Vec::with_capacity(2 * left.len());
    for i in 0..left.len() {
        out.push(Edge::new(left[i], right[i]));
        if i + 1 < left.len() {
            out.push(Edge::new(right[i], left[i + 1]));
        }
    }
    out
}

impl VertexGadget {
    /// Edges of the gadget present in both triangulations.
    pub fn edges(&self) -> Vec<Edge> {
        let circle = self.circle_points();
        let mut out: Vec<Edge> = circle.windows(2).map(|p| Edge::new(p[0], p[1])).collect();
        out.extend(&self.zigzag);
        out.push(Edge::new(self.center, self.wiring_left[0]));
        out.push(Edge::new(self.center, self.wiring_right[0]));
        out
    }

    /// Triangles cut out by the gadget edges: the zig-zag strip and `v l_1 r_1`.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        let (l, r) = (&self.wiring_left, &self.wiring_right);
        let mut out = vec![[self.center, l[0], r[0]]];
        for i in 0..l.len() {
            if i + 1 < l.len() {
                out.push([l[i], r[i], l[i + 1]]);
                out.push([r[i], l[i + 1], r[i + 1]]);
            }
        }
        out
    }
}
