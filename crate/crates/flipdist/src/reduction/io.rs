//! Instance and parameter files.
//!
//! Rationals are written `num/den` (or `num`). An instance file lists the
//! graph, the parameters, the points, both triangulations, the gadgets and
//! the certificate; arc circles are recomputed from the tunnel corners.

use super::arcs::ArcDesc;
use super::certificate::{GpCertificate, GridFamily};
use super::graph::CubicGraph;
use super::param::Family;
use super::{CrossingGadget, EdgeGadget, LayoutParams, ReductionError, ReductionInstance, VertexGadget};
use crate::double_chain::DoubleChain;
use crate::formats::{edge_lines, point_lines, FormatError, Lines};
use crate::geometry::{Point, Rational};
use crate::pointset::PointSet;
use crate::triangulation::{Edge, Triangulation};
use num_bigint::BigInt;
use std::fmt::Write as _;
use std::sync::Arc;

const MAGIC: &str = "flipdist-instance 1";

/// `key=value` lines: layout parameters and the flip budget for `k`.
pub fn write_params(inst: &ReductionInstance, k: Option<usize>) -> String {
    let p = &inst.params;
    let mut s = String::new();
    let _ = writeln!(s, "n={}", inst.graph.vertex_count());
    let _ = writeln!(s, "m={}", inst.graph.edge_count());
    let _ = writeln!(s, "x_prime={}", p.x_prime);
    let _ = writeln!(s, "x={}", p.x);
    let _ = writeln!(s, "d={}", p.d);
    let _ = writeln!(s, "w={}", p.w);
    let _ = writeln!(s, "tau={}", p.tau);
    let _ = writeln!(s, "c={}", p.c);
    let _ = writeln!(s, "delta_num/den={}", p.delta);
    let _ = writeln!(s, "r_v={}", p.r_v);
    let _ = writeln!(s, "points={}", inst.point_set.len());
    let _ = writeln!(s, "overridden={}", inst.overridden);
    if let Some(k) = k {
        let _ = writeln!(s, "k={k}");
        let _ = writeln!(s, "delta_k={}", inst.delta_bound(k));
    }
    s
}

/// Parses `key=value` lines in order.
pub fn read_params(text: &str) -> Result<Vec<(String, String)>, FormatError> {
    let mut l = Lines::new(text);
    let mut out = Vec::new();
    while !l.is_done() {
        let t = l.next_line()?.join(" ");
        let (k, v) = t.split_once('=').ok_or_else(|| l.err("expected key=value"))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn join<T: std::fmt::Display>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Serializes an instance.
pub fn write_instance(inst: &ReductionInstance) -> String {
    let mut s = String::new();
    let p = &inst.params;
    let _ = writeln!(s, "{MAGIC}");
    let _ = writeln!(s, "graph {}", inst.graph.vertex_count());
    for (u, v) in inst.graph.edges() {
        let _ = writeln!(s, "{u} {v}");
    }
    let _ = writeln!(
        s,
        "params {} {} {} {} {} {} {} {} {}",
        p.delta, p.r_v, p.x_prime, p.x, p.d, p.w, p.c, p.tau, inst.overridden as u8
    );
    let ps = &inst.point_set;
    let _ = writeln!(s, "points {}", ps.len());
    point_lines(&mut s, ps.points());
    for (name, t) in [("t1", &inst.t1), ("t2", &inst.t2)] {
        let edges = t.edges_sorted();
        let _ = writeln!(s, "{name} {}", edges.len());
        edge_lines(&mut s, &edges);
    }
    let _ = writeln!(s, "vertices {}", inst.vertex_gadgets.len());
    for g in &inst.vertex_gadgets {
        let _ = writeln!(s, "vertex {} {}", g.center, g.radius);
        let _ = writeln!(s, "ports {}", join(&g.ports));
        let _ = writeln!(s, "left {}", join(&g.wiring_left));
        let _ = writeln!(s, "right {}", join(&g.wiring_right));
    }
    let _ = writeln!(s, "crossings {}", inst.crossings.len());
    for c in &inst.crossings {
        let _ = writeln!(s, "crossing {} {} {} {} {}", c.e, c.f, join(c.corners), c.diagonal.a, c.diagonal.b);
    }
    let _ = writeln!(s, "edges {}", inst.edge_gadgets.len());
    for eg in &inst.edge_gadgets {
        let _ = writeln!(s, "edge {} {} {}", eg.first, eg.second, join(eg.tunnel));
        let _ = writeln!(s, "upper {}", join(&eg.chain.upper));
        let _ = writeln!(s, "lower {}", join(&eg.chain.lower));
        let _ = writeln!(s, "via {}", join(&eg.crossings));
        let _ = writeln!(s, "upper_side {}", join(&eg.upper_side));
        let _ = writeln!(s, "lower_side {}", join(&eg.lower_side));
    }
    let cert = &inst.certificate;
    let _ = writeln!(s, "certificate {} {}", cert.prime, cert.families.len());
    for g in &cert.families {
        let f = &g.family;
        let _ = writeln!(
            s,
            "family {} {} {} {}",
            join(f.h0.iter()),
            join(f.h1.iter()),
            join(f.h2.iter()),
            g.m
        );
        let _ = writeln!(s, "members {}", join(g.members.iter().map(|(i, n)| format!("{i}:{n}"))));
    }
    let _ = writeln!(s, "exceptional {}", join(&cert.exceptional));
    let _ = writeln!(s, "reach {}", inst.reach_costs.len());
    for (v, e, c) in &inst.reach_costs {
        let _ = writeln!(s, "{v} {e} {c}");
    }
    let _ = writeln!(s, "end");
    s
}

/// Replacements for the point and triangulation sections of an instance file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub points: Option<Vec<Point>>,
    pub t1: Option<Vec<Edge>>,
    pub t2: Option<Vec<Edge>>,
}

/// Parses [`write_instance`] output; both triangulations are validated.
pub fn read_instance(text: &str) -> Result<ReductionInstance, ReductionError> {
    read_instance_with(text, Overrides::default())
}

/// [`read_instance`] with the points or triangulations taken from
/// `overrides` instead of the file.
pub fn read_instance_with(text: &str, mut overrides: Overrides) -> Result<ReductionInstance, ReductionError> {
    let mut l = Lines::new(text);
    let head = l.next_line()?.join(" ");
    if head != MAGIC {
        return Err(l.err("not an instance file").into());
    }
    let t = l.keyed("graph")?;
    let n: usize = l.parse(t.first().ok_or_else(|| l.err("missing vertex count"))?)?;
    let mut gedges = Vec::with_capacity(3 * n / 2);
    for _ in 0..3 * n / 2 {
        let t = l.next_line()?;
        let v = l.usizes(&t)?;
        if v.len() != 2 {
            return Err(l.err("expected a graph edge").into());
        }
        gedges.push((v[0], v[1]));
    }
    let graph = CubicGraph::new(n, gedges)?;
    let t = l.keyed("params")?;
    if t.len() != 9 {
        return Err(l.err("expected nine parameters").into());
    }
    let params = LayoutParams {
        delta: l.parse(t[0])?,
        r_v: l.parse(t[1])?,
        x_prime: l.parse(t[2])?,
        x: l.parse(t[3])?,
        d: l.parse(t[4])?,
        w: l.parse(t[5])?,
        c: l.parse(t[6])?,
        tau: l.parse(t[7])?,
    };
    let overridden = t[8] == "1";
    let count: usize = l.count("points")?;
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let t = l.next_line()?;
        points.push(l.point(&t)?);
    }
    if let Some(p) = overrides.points.take() {
        if p.len() != points.len() {
            return Err(ReductionError::Io(format!("expected {} points, got {}", points.len(), p.len())));
        }
        points = p;
    }
    let ps = Arc::new(PointSet::new_unverified(points)?);
    let mut tris = Vec::with_capacity(2);
    for (name, ov) in [("t1", overrides.t1.take()), ("t2", overrides.t2.take())] {
        let k: usize = l.count(name)?;
        let mut edges = Vec::with_capacity(k);
        for _ in 0..k {
            let t = l.next_line()?;
            edges.push(l.edge(&t)?);
        }
        let edges = ov.unwrap_or(edges);
        tris.push(Triangulation::from_edges(ps.clone(), edges)?);
    }
    let t2 = tris.pop().expect("two triangulations");
    let t1 = tris.pop().expect("two triangulations");

    let nv: usize = l.count("vertices")?;
    let mut vertex_gadgets = Vec::with_capacity(nv);
    for _ in 0..nv {
        let t = l.keyed("vertex")?;
        if t.len() != 2 {
            return Err(l.err("expected center and radius").into());
        }
        let center: usize = l.parse(t[0])?;
        let radius: Rational = l.parse(t[1])?;
        let ports = l.list("ports")?;
        let wiring_left = l.list("left")?;
        let wiring_right = l.list("right")?;
        if center >= ps.len() || wiring_left.len() != wiring_right.len() || wiring_left.is_empty() {
            return Err(l.err("malformed vertex gadget").into());
        }
        vertex_gadgets.push(VertexGadget {
            center,
            center_point: ps.point(center).clone(),
            radius,
            ports,
            zigzag: super::wiring::zigzag(&wiring_left, &wiring_right),
            wiring_left,
            wiring_right,
        });
    }
    let nc: usize = l.count("crossings")?;
    let mut crossings = Vec::with_capacity(nc);
    for _ in 0..nc {
        let v = l.list("crossing")?;
        if v.len() != 8 {
            return Err(l.err("malformed crossing").into());
        }
        crossings.push(CrossingGadget {
            e: v[0],
            f: v[1],
            corners: [v[2], v[3], v[4], v[5]],
            diagonal: Edge::new(v[6], v[7]),
        });
    }
    let ne: usize = l.count("edges")?;
    let mut edge_gadgets = Vec::with_capacity(ne);
    let pt = |i: usize| -> Result<&Point, ReductionError> {
        if i < ps.len() {
            Ok(ps.point(i))
        } else {
            Err(ReductionError::Io(format!("point index {i} out of range")))
        }
    };
    for _ in 0..ne {
        let v = l.list("edge")?;
        if v.len() != 6 {
            return Err(l.err("malformed edge gadget").into());
        }
        let (first, second) = (v[0], v[1]);
        let tunnel = [v[2], v[3], v[4], v[5]];
        let upper = l.list("upper")?;
        let lower = l.list("lower")?;
        let via = l.list("via")?;
        let upper_side = l.list("upper_side")?;
        let lower_side = l.list("lower_side")?;
        let (fv, fw) = (pt(first)?, pt(second)?);
        let arcs = [
            ArcDesc::new(pt(tunnel[0])?, pt(tunnel[3])?, fw, fv)?,
            ArcDesc::new(pt(tunnel[1])?, pt(tunnel[2])?, fw, fv)?,
        ];
        let chain = DoubleChain::new_unchecked(ps.clone(), upper, lower, (fv.clone(), fw.clone()))?;
        edge_gadgets.push(EdgeGadget {
            first,
            second,
            tunnel,
            arcs,
            chain,
            crossings: via,
            upper_side,
            lower_side,
        });
    }
    let t = l.keyed("certificate")?;
    if t.len() != 2 {
        return Err(l.err("expected prime and family count").into());
    }
    let prime: u64 = l.parse(t[0])?;
    let nf: usize = l.parse(t[1])?;
    let mut families = Vec::with_capacity(nf);
    for _ in 0..nf {
        let t = l.keyed("family")?;
        if t.len() != 10 {
            return Err(l.err("expected nine coefficients and a denominator").into());
        }
        let b: Vec<BigInt> = t.iter().map(|x| l.parse(x)).collect::<Result<_, _>>()?;
        let family = Family {
            h0: [b[0].clone(), b[1].clone(), b[2].clone()],
            h1: [b[3].clone(), b[4].clone(), b[5].clone()],
            h2: [b[6].clone(), b[7].clone(), b[8].clone()],
        };
        let mut members = Vec::new();
        for tok in l.keyed("members")? {
            let (i, k) = tok.split_once(':').ok_or_else(|| l.err("expected index:parameter"))?;
            members.push((l.parse(i)?, l.parse(k)?));
        }
        families.push(GridFamily {
            family,
            m: b[9].clone(),
            members,
        });
    }
    let exceptional = l.list("exceptional")?;
    let nr: usize = l.count("reach")?;
    let mut reach_costs = Vec::with_capacity(nr);
    for _ in 0..nr {
        let t = l.next_line()?;
        let v = l.usizes(&t)?;
        if v.len() != 3 {
            return Err(l.err("expected vertex, edge and cost").into());
        }
        reach_costs.push((v[0], v[1], v[2]));
    }
    l.keyed("end")?;
    Ok(ReductionInstance {
        graph,
        params,
        point_set: ps,
        t1,
        t2,
        vertex_gadgets,
        edge_gadgets,
        crossings,
        certificate: GpCertificate {
            prime,
            families,
            exceptional,
        },
        reach_costs,
        overridden,
    })
}
