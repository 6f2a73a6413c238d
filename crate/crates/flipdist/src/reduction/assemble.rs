//! Instance generation: the parameter-independent skeleton (polygon,
//! tunnels, arcs, crossings, prime) and its realization for given `d`, `w`.

use super::arcs::{center_gap, chain_brackets, ArcDesc};
use super::certificate::{choose_prime, CollinearityGuard, GpCertificate, GridFamily};
use super::compile::measure_reach;
use super::completion::complete;
use super::crossing::{place_crossing, raw_corners, sort_along, PlacedCrossing, SideFences, TunnelView};
use super::graph::CubicGraph;
use super::layout::{compute_clearances, embed_polygon, projection_param, Clearances, Drawing};
use super::param::grid_parameters;
use super::tunnel::{build_tunnel, candidate_count, check_disjoint_at_center, TunnelPorts};
use super::wiring::{plan_wiring, wiring_parameters, zigzag, WiringPlan};
use super::{
    io, CrossingGadget, EdgeGadget, LayoutParams, ReductionConfig, ReductionError, ReductionInstance, VertexGadget,
};
use crate::double_chain::DoubleChain;
use crate::geometry::{Point, Rational};
use crate::pointset::PointSet;
use crate::triangulation::{Edge, Triangulation};
use num_bigint::BigInt;
use rustc_hash::FxHashSet;
use std::path::Path;
use std::sync::Arc;

/// Smallest `d` (with `w = w(d)`) such that `(d - 1)^2 > 2 (n (2w - 1) + m (4x + 2d) + tau)`,
/// returned as `(d, w, tau)` with `tau = c n`.
pub fn choose_parameters(n: usize, m: usize, x: usize, c: usize) -> (usize, usize, usize) {
    let tau = c * n;
    let mut d = 2;
    loop {
        let w = LayoutParams::w_of_d(m, x, d, tau);
        let lhs = (d as u128 - 1).pow(2);
        let rhs = 2 * (n as u128 * (2 * w as u128 - 1) + m as u128 * (4 * x as u128 + 2 * d as u128) + tau as u128);
        if lhs > rhs {
            return (d, w, tau);
        }
        d += 1;
    }
}

/// `max_v sum_{e at v} max(0, reach(v, e) - (4x + 2))`.
pub fn excess_constant(reach: &[(usize, usize, usize)], n: usize, x: usize) -> usize {
    let mut per = vec![0usize; n];
    for &(v, _, cost) in reach {
        per[v] += cost.saturating_sub(4 * x + 2);
    }
    per.into_iter().max().unwrap_or(0)
}

/// Everything that does not depend on `d` and `w`.
#[derive(Debug, Clone)]
pub struct Skeleton {
    pub graph: CubicGraph,
    pub config: ReductionConfig,
    pub polygon: Vec<Point>,
    pub clearances: Clearances,
    pub drawing: Drawing,
    pub x_prime: usize,
    pub x: usize,
    /// Per graph edge: `(first, second)` with `first` the smaller x.
    pub ends: Vec<(usize, usize)>,
    pub tunnels: Vec<TunnelPorts>,
    pub arcs: Vec<[ArcDesc; 2]>,
    /// `(edge e, edge f, placement)` per drawn crossing.
    pub crossings: Vec<(usize, usize, PlacedCrossing)>,
    /// Slope brackets of the chain points per edge and side.
    pub brackets: Vec<[(Rational, Rational); 2]>,
    pub plans: Vec<WiringPlan>,
    /// Ports per vertex as `(edge, slot in the tunnel array)`, in the order
    /// given to [`plan_wiring`].
    pub ports: Vec<Vec<(usize, usize)>>,
    pub prime: u64,
}

impl Skeleton {
    pub fn new(graph: &CubicGraph, config: &ReductionConfig) -> Result<Skeleton, ReductionError> {
        let n = graph.vertex_count();
        let cap = config.farey_cap_multiplier;
        let polygon = embed_polygon(n)?;
        let clearances = compute_clearances(&polygon)?;
        let drawing = Drawing::new(graph, &polygon);
        let x_prime = drawing.max_crossings();
        let x = x_prime.div_ceil(2);
        let r = clearances.r_v.clone();
        let candidates = candidate_count(n);

        let mut guard = CollinearityGuard::new();
        for p in &polygon {
            guard.push(p);
        }
        let mut ends = Vec::with_capacity(graph.edge_count());
        let mut tunnels = Vec::with_capacity(graph.edge_count());
        for &(a, b) in graph.edges() {
            let (v, w) = if polygon[a].x < polygon[b].x { (a, b) } else { (b, a) };
            tunnels.push(build_tunnel(&polygon[v], &polygon[w], &r, candidates, &mut guard, cap)?);
            ends.push((v, w));
        }
        let mut ports: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (e, &(v, w)) in ends.iter().enumerate() {
            ports[v].push((e, 0));
            ports[v].push((e, 1));
            ports[w].push((e, 2));
            ports[w].push((e, 3));
        }
        for (v, list) in ports.iter().enumerate() {
            let sides: Vec<(Point, Point)> = list
                .iter()
                .map(|&(e, slot)| {
                    let t = &tunnels[e];
                    match slot {
                        0 => (t.p_v.clone(), t.p_w.clone()),
                        1 => (t.q_v.clone(), t.q_w.clone()),
                        2 => (t.q_w.clone(), t.q_v.clone()),
                        _ => (t.p_w.clone(), t.p_v.clone()),
                    }
                })
                .collect();
            check_disjoint_at_center(&sides).map_err(|err| ReductionError::Layout(format!("vertex {v}: {err}")))?;
        }

        let mut arcs = Vec::with_capacity(ends.len());
        for (e, &(v, w)) in ends.iter().enumerate() {
            let t = &tunnels[e];
            let (pv, pw) = (&polygon[v], &polygon[w]);
            arcs.push([ArcDesc::new(&t.p_v, &t.p_w, pw, pv)?, ArcDesc::new(&t.q_v, &t.q_w, pw, pv)?]);
        }

        let views: Vec<TunnelView> = (0..ends.len())
            .map(|e| TunnelView {
                ends: (&polygon[ends[e].0], &polygon[ends[e].1]),
                sides: [(&tunnels[e].p_v, &tunnels[e].p_w), (&tunnels[e].q_v, &tunnels[e].q_w)],
                arcs: &arcs[e],
            })
            .collect();
        let mut fences: Vec<[SideFences; 2]> = vec![Default::default(); ends.len()];
        for c in &drawing.crossings {
            let raw = raw_corners(&views[c.e], &views[c.f])?;
            for a in 0..2 {
                for b in 0..2 {
                    fences[c.e][a].corners.push(raw[a][b].clone());
                    fences[c.f][b].corners.push(raw[a][b].clone());
                }
            }
        }
        for (e, f) in fences.iter_mut().enumerate() {
            for side in f.iter_mut() {
                sort_along(views[e].ends, &mut side.corners);
            }
        }
        let mut crossings = Vec::with_capacity(drawing.crossings.len());
        for c in &drawing.crossings {
            let placed = place_crossing(&views[c.e], &views[c.f], &fences[c.e], &fences[c.f], candidates, &mut guard)?;
            crossings.push((c.e, c.f, placed));
        }
        drop(views);

        let mut brackets = Vec::with_capacity(ends.len());
        for (e, &(v, w)) in ends.iter().enumerate() {
            let (pv, pw) = (&polygon[v], &polygon[w]);
            let lam = |p: &Point| projection_param(pv, pw, p);
            let t = &tunnels[e];
            let mut intervals: Vec<(Rational, Rational)> = crossings
                .iter()
                .filter(|(a, b, _)| *a == e || *b == e)
                .map(|(_, _, pc)| {
                    let ls: Vec<Rational> = pc.corners.iter().map(lam).collect();
                    let lo = ls.iter().min().expect("four corners").clone();
                    let hi = ls.iter().max().expect("four corners").clone();
                    (lo, hi)
                })
                .collect();
            intervals.sort();
            let mouth_v = std::cmp::max(lam(&t.p_v), lam(&t.q_v));
            let mouth_w = std::cmp::min(lam(&t.p_w), lam(&t.q_w));
            let gap = center_gap(&intervals, &mouth_v, &mouth_w)?;
            let b0 = chain_brackets(&arcs[e][0], (pv, pw), &gap, cap)?;
            let b1 = chain_brackets(&arcs[e][1], (pv, pw), &gap, cap)?;
            brackets.push([b0, b1]);
        }

        let mut plans = Vec::with_capacity(n);
        for v in 0..n {
            let pts: Vec<Point> = ports[v].iter().map(|&(e, s)| tunnels[e].as_array()[s].clone()).collect();
            plans.push(plan_wiring(&polygon[v], &r, &pts)?);
        }

        let mut families: Vec<_> = plans.iter().map(|p| p.family.clone()).collect();
        for a in &arcs {
            families.push(a[0].family.clone());
            families.push(a[1].family.clone());
        }
        let mut exceptional: Vec<Point> = polygon.clone();
        for t in &tunnels {
            exceptional.extend(t.as_array().into_iter().cloned());
        }
        for (_, _, pc) in &crossings {
            exceptional.extend(pc.corners.iter().cloned());
        }
        let prime = choose_prime(&families, &exceptional, config.prime_start)?;

        Ok(Skeleton {
            graph: graph.clone(),
            config: config.clone(),
            polygon,
            clearances,
            drawing,
            x_prime,
            x,
            ends,
            tunnels,
            arcs,
            crossings,
            brackets,
            plans,
            ports,
            prime,
        })
    }

    /// Builds the instance with `d` points per chain and `w` wiring points
    /// per side; `c` only fills in the recorded parameters.
    pub fn realize(&self, d: usize, w: usize, c: usize) -> Result<ReductionInstance, ReductionError> {
        let n = self.graph.vertex_count();
        let m = self.ends.len();
        let p = self.prime;
        let mut points: Vec<Point> = self.polygon.clone();
        let mut exceptional: Vec<usize> = (0..n).collect();

        let mut tunnel_idx = Vec::with_capacity(m);
        for t in &self.tunnels {
            let base = points.len();
            points.extend(t.as_array().into_iter().cloned());
            exceptional.extend(base..base + 4);
            tunnel_idx.push([base, base + 1, base + 2, base + 3]);
        }
        let mut crossings = Vec::with_capacity(self.crossings.len());
        for (e, f, pc) in &self.crossings {
            let base = points.len();
            points.extend(pc.corners.iter().cloned());
            exceptional.extend(base..base + 4);
            let corners = [base, base + 1, base + 2, base + 3];
            crossings.push(CrossingGadget {
                e: *e,
                f: *f,
                corners,
                diagonal: Edge::new(corners[pc.diagonal.0], corners[pc.diagonal.1]),
            });
        }

        let mut families = Vec::with_capacity(n + 2 * m);
        let mut vertex_gadgets = Vec::with_capacity(n);
        for v in 0..n {
            let plan = &self.plans[v];
            let (mm, left, right) = wiring_parameters(plan, w, p)?;
            let mut members = Vec::with_capacity(2 * w);
            let mut lists: [Vec<usize>; 2] = [Vec::with_capacity(w), Vec::with_capacity(w)];
            for (list, ns) in lists.iter_mut().zip([&left, &right]) {
                for k in ns {
                    let i = points.len();
                    points.push(plan.family.point_nm(k, &mm));
                    members.push((i, k.clone()));
                    list.push(i);
                }
            }
            let [wiring_left, wiring_right] = lists;
            families.push(GridFamily {
                family: plan.family.clone(),
                m: mm,
                members,
            });
            let ports: Vec<usize> = plan
                .port_order
                .iter()
                .map(|&k| {
                    let (e, s) = self.ports[v][k];
                    tunnel_idx[e][s]
                })
                .collect();
            vertex_gadgets.push(VertexGadget {
                center: v,
                center_point: self.polygon[v].clone(),
                radius: self.clearances.r_v.clone(),
                ports,
                zigzag: zigzag(&wiring_left, &wiring_right),
                wiring_left,
                wiring_right,
            });
        }

        let mut chains: Vec<[Vec<usize>; 2]> = Vec::with_capacity(m);
        for (e, &(v, wv)) in self.ends.iter().enumerate() {
            let (pv, pw) = (&self.polygon[v], &self.polygon[wv]);
            let mut sides: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
            for s in 0..2 {
                let arc = &self.arcs[e][s];
                let (lo, hi) = &self.brackets[e][s];
                let (mm, ns) = grid_parameters(lo, hi, d, p)?;
                let mut placed: Vec<(Rational, Point, BigInt)> = ns
                    .into_iter()
                    .map(|k| {
                        let pt = arc.family.point_nm(&k, &mm);
                        (projection_param(pv, pw, &pt), pt, k)
                    })
                    .collect();
                placed.sort_by(|a, b| a.0.cmp(&b.0));
                let mut members = Vec::with_capacity(d);
                for (_, pt, k) in placed {
                    let i = points.len();
                    points.push(pt);
                    members.push((i, k));
                    sides[s].push(i);
                }
                families.push(GridFamily {
                    family: arc.family.clone(),
                    m: mm,
                    members,
                });
            }
            chains.push(sides);
        }

        let ps = Arc::new(PointSet::new_unverified(points)?);
        let mut edge_gadgets = Vec::with_capacity(m);
        for (e, &(v, wv)) in self.ends.iter().enumerate() {
            let [upper, lower] = chains[e].clone();
            let chain = DoubleChain::new_unchecked(
                ps.clone(),
                upper,
                lower,
                (self.polygon[v].clone(), self.polygon[wv].clone()),
            )?;
            let mine: Vec<usize> = (0..crossings.len())
                .filter(|&k| crossings[k].e == e || crossings[k].f == e)
                .collect();
            let (pv, pw) = (&self.polygon[v], &self.polygon[wv]);
            let mut sides: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
            for &k in &mine {
                let (ce, _, pc) = &self.crossings[k];
                for (slot, &(se, sf)) in pc.on.iter().enumerate() {
                    let side = if *ce == e { se } else { sf };
                    sides[side].push(crossings[k].corners[slot]);
                }
            }
            for side in sides.iter_mut() {
                side.sort_by_cached_key(|&i| projection_param(pv, pw, ps.point(i)));
            }
            let t = tunnel_idx[e];
            let mut upper_side = vec![t[0]];
            upper_side.extend(&sides[0]);
            upper_side.push(t[3]);
            let mut lower_side = vec![t[1]];
            lower_side.extend(&sides[1]);
            lower_side.push(t[2]);
            edge_gadgets.push(EdgeGadget {
                first: v,
                second: wv,
                tunnel: t,
                arcs: self.arcs[e].clone(),
                chain,
                crossings: mine,
                upper_side,
                lower_side,
            });
        }

        let mut constraints: Vec<Edge> = Vec::new();
        let mut pre: FxHashSet<[usize; 3]> = FxHashSet::default();
        let add_tri = |t: [usize; 3], pre: &mut FxHashSet<[usize; 3]>| {
            let mut k = t;
            k.sort_unstable();
            pre.insert(k);
        };
        for g in &vertex_gadgets {
            constraints.extend(g.edges());
            for t in g.triangles() {
                add_tri(t, &mut pre);
            }
        }
        for cg in &crossings {
            let c = cg.corners;
            for i in 0..4 {
                constraints.push(Edge::new(c[i], c[(i + 1) % 4]));
            }
            constraints.push(cg.diagonal);
            let (a, b) = (cg.diagonal.a, cg.diagonal.b);
            for &o in &c {
                if o != a && o != b {
                    add_tri([a, b, o], &mut pre);
                }
            }
        }
        for eg in &edge_gadgets {
            for side in [&eg.upper_side, &eg.lower_side] {
                constraints.extend(side.windows(2).map(|w| Edge::new(w[0], w[1])));
            }
            let ch = &eg.chain;
            constraints.extend(ch.boundary_edges());
            constraints.extend(eg.t1_diagonals());
            for j in 0..d - 1 {
                add_tri([ch.u(0), ch.l(j), ch.l(j + 1)], &mut pre);
                add_tri([ch.l(d - 1), ch.u(j), ch.u(j + 1)], &mut pre);
            }
        }
        let t1_edges = complete(&ps, &constraints, &pre)?;
        let t1 = Triangulation::from_edges(ps.clone(), t1_edges.iter().copied())?;
        let mut t2_set: FxHashSet<Edge> = t1_edges.into_iter().collect();
        for eg in &edge_gadgets {
            for e in eg.t1_diagonals() {
                t2_set.remove(&e);
            }
            t2_set.extend(eg.t2_diagonals());
        }
        let t2 = Triangulation::from_edges(ps.clone(), t2_set)?;

        let reach_costs = measure_reach(&t1, &vertex_gadgets, &edge_gadgets)?;
        exceptional.sort_unstable();
        let certificate = GpCertificate {
            prime: p,
            families,
            exceptional,
        };
        let params = LayoutParams {
            delta: self.clearances.delta.clone(),
            r_v: self.clearances.r_v.clone(),
            x_prime: self.x_prime,
            x: self.x,
            d,
            w,
            c,
            tau: c * n,
        };
        Ok(ReductionInstance {
            graph: self.graph.clone(),
            params,
            point_set: ps,
            t1,
            t2,
            vertex_gadgets,
            edge_gadgets,
            crossings,
            certificate,
            reach_costs,
            overridden: self.config.override_dw.is_some(),
        })
    }
}

/// [`assemble_with`] under the default configuration.
pub fn assemble(graph: &CubicGraph) -> Result<ReductionInstance, ReductionError> {
    assemble_with(graph, &ReductionConfig::default())
}

/// Builds the reduction instance of `graph`. The excess constant `c` is
/// first measured on a small probe realization; the full instance is then
/// rebuilt with a larger `c` until the measured value no longer exceeds the
/// one the parameters were chosen for.
pub fn assemble_with(graph: &CubicGraph, config: &ReductionConfig) -> Result<ReductionInstance, ReductionError> {
    let sk = Skeleton::new(graph, config)?;
    let n = graph.vertex_count();
    let m = graph.edge_count();
    if let Some((d, w)) = config.override_dw {
        let inst = sk.realize(d, w, 0)?;
        let c = excess_constant(&inst.reach_costs, n, sk.x);
        return Ok(with_c(inst, c));
    }
    let probe = sk.realize(3, 2, 0)?;
    let mut c = excess_constant(&probe.reach_costs, n, sk.x);
    drop(probe);
    for _ in 0..4 {
        let (d, w, _) = choose_parameters(n, m, sk.x, c);
        let inst = sk.realize(d, w, c)?;
        let measured = excess_constant(&inst.reach_costs, n, sk.x);
        if measured <= c {
            return Ok(inst);
        }
        c = measured;
    }
    Err(ReductionError::invariant("excess constant", "did not stabilize"))
}

fn with_c(mut inst: ReductionInstance, c: usize) -> ReductionInstance {
    inst.params.c = c;
    inst.params.tau = c * inst.graph.vertex_count();
    inst
}

/// Environment variable naming the instance cache directory.
pub const CACHE_ENV: &str = "FLIPDIST_CACHE_DIR";

/// [`assemble_with`] through the cache directory named by `FLIPDIST_CACHE_DIR`,
/// when set.
pub fn assemble_cached(graph: &CubicGraph, config: &ReductionConfig) -> Result<ReductionInstance, ReductionError> {
    match std::env::var_os(CACHE_ENV) {
        Some(dir) => assemble_in_cache(Path::new(&dir), graph, config),
        None => assemble_with(graph, config),
    }
}

/// [`assemble_with`], reusing `dir/<graph hash>-<config hash>.inst` when it
/// parses and its certificate verifies, and writing it otherwise.
pub fn assemble_in_cache(
    dir: &Path,
    graph: &CubicGraph,
    config: &ReductionConfig,
) -> Result<ReductionInstance, ReductionError> {
    let path = dir.join(format!("{:016x}-{:016x}.inst", graph.stable_hash(), config.stable_hash()));
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Ok(inst) = io::read_instance(&text) {
            if inst.graph == *graph && inst.certificate.verify(&inst.point_set).is_ok() {
                return Ok(inst);
            }
        }
    }
    let inst = assemble_with(graph, config)?;
    let io_err = |e: std::io::Error| ReductionError::Io(e.to_string());
    std::fs::create_dir_all(dir).map_err(io_err)?;
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, io::write_instance(&inst)).map_err(io_err)?;
    std::fs::rename(&tmp, &path).map_err(io_err)?;
    Ok(inst)
}
