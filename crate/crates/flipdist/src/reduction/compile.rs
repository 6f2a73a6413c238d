//! Compilers between vertex covers and flip sequences on a reduction
//! instance, and segment insertion by flips.

use super::{EdgeGadget, ReductionError, ReductionInstance, VertexGadget};
use crate::geometry::Orientation;
use crate::triangulation::{Edge, FlipSequence, FlipStep, Triangulation};
use rustc_hash::FxHashMap;
use std::collections::VecDeque;

/// Triangles `(s, a, b)` around `s`, counterclockwise, as `(a, b)` pairs,
/// starting from the neighbour `start`.
fn fan(t: &Triangulation, s: usize, start: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut a = start;
    while let Some(b) = t.apex_left(s, a) {
        out.push((a, b));
        a = b;
        if a == start {
            return out;
        }
    }
    let mut b = start;
    while let Some(a) = t.apex_left(b, s) {
        out.push((a, b));
        b = a;
    }
    out
}

/// Makes `s -- target` an edge by flipping the edges crossing the segment
/// (Sloan's method). `hint` is any current neighbour of `s`; without it one
/// is found by scanning the edge set. Returns the flips performed.
pub fn insert_segment(
    t: &mut Triangulation,
    s: usize,
    target: usize,
    hint: Option<usize>,
) -> Result<Vec<FlipStep>, ReductionError> {
    if t.contains(Edge::new(s, target)) {
        return Ok(Vec::new());
    }
    let ps = t.point_set().clone();
    let start = match hint.filter(|&h| t.contains(Edge::new(s, h))) {
        Some(h) => h,
        None => t
            .edges()
            .find(|e| e.has(s))
            .map(|e| e.other(s))
            .ok_or_else(|| ReductionError::invariant("insert_segment", format!("point {s} has no edges")))?,
    };
    let (mut a, mut b) = fan(t, s, start)
        .into_iter()
        .find(|&(a, b)| ps.orient(s, a, target) == Orientation::Left && ps.orient(s, b, target) == Orientation::Right)
        .ok_or_else(|| ReductionError::invariant("insert_segment", format!("no triangle at {s} faces {target}")))?;
    // a is right of s -> target, b left
    let mut queue = VecDeque::new();
    loop {
        queue.push_back(Edge::new(a, b));
        let c = t
            .apex_left(b, a)
            .ok_or_else(|| ReductionError::invariant("insert_segment", "segment leaves the hull"))?;
        if c == target {
            break;
        }
        if ps.orient(s, target, c) == Orientation::Left {
            b = c;
        } else {
            a = c;
        }
    }
    let mut steps = Vec::new();
    let mut stalls = 0usize;
    let want = Edge::new(s, target);
    while let Some(e) = queue.pop_front() {
        if !t.flippable(e)? {
            queue.push_back(e);
            stalls += 1;
            if stalls > 4 * (queue.len() + 1) * (queue.len() + 1) {
                return Err(ReductionError::invariant("insert_segment", "no flippable crossing edge"));
            }
            continue;
        }
        stalls = 0;
        let step = t.flip_in_place(e)?;
        steps.push(step);
        let ne = step.inserted;
        if ne != want && ps.cross(ne.a, ne.b, s, target) {
            queue.push_back(ne);
        }
    }
    if !t.contains(want) {
        return Err(ReductionError::invariant("insert_segment", format!("{want} missing after insertion")));
    }
    Ok(steps)
}

fn undo(t: &mut Triangulation, steps: &[FlipStep], out: &mut Vec<FlipStep>) -> Result<(), ReductionError> {
    for s in steps.iter().rev() {
        let back = FlipStep {
            removed: s.inserted,
            inserted: s.removed,
        };
        t.apply_step_in_place(out.len(), &back)?;
        out.push(back);
    }
    Ok(())
}

fn apply(t: &mut Triangulation, steps: &[FlipStep], out: &mut Vec<FlipStep>) -> Result<(), ReductionError> {
    for s in steps {
        t.apply_step_in_place(out.len(), s)?;
        out.push(*s);
    }
    Ok(())
}

/// Flips the zig-zag away: each flip joins the wire center to the next point.
fn open_wiring(t: &mut Triangulation, g: &VertexGadget) -> Result<Vec<FlipStep>, ReductionError> {
    g.zigzag.iter().map(|&e| t.flip_in_place(e).map_err(Into::into)).collect()
}

/// Flips turning the fan from `fan_a` over `chain_a` (with `fan_b` covering
/// the rest) into the star of `s`, which must already be joined to
/// `fan_a` and `chain_a[0]`.
fn star_steps(fan_a: usize, chain_a: &[usize], fan_b: usize, chain_b: &[usize], s: usize) -> Vec<FlipStep> {
    let d = chain_a.len();
    let mut out = Vec::with_capacity(2 * d - 2);
    for j in 0..d {
        let next = if j + 1 < d { chain_a[j + 1] } else { chain_b[1] };
        out.push(FlipStep {
            removed: Edge::new(fan_a, chain_a[j]),
            inserted: Edge::new(s, next),
        });
    }
    for i in 1..d - 1 {
        out.push(FlipStep {
            removed: Edge::new(fan_b, chain_b[i]),
            inserted: Edge::new(s, chain_b[i + 1]),
        });
    }
    out
}

/// Chains as seen from the given endpoint: the first point of each lies
/// next to that endpoint, the upper one on its left.
fn view(eg: &EdgeGadget, from_first: bool) -> (Vec<usize>, Vec<usize>) {
    let c = &eg.chain;
    if from_first {
        (c.upper.clone(), c.lower.clone())
    } else {
        (c.lower.iter().rev().copied().collect(), c.upper.iter().rev().copied().collect())
    }
}

/// The `4d - 4` flips transforming the edge center through the star of `s`.
pub fn transform_steps(eg: &EdgeGadget, from_first: bool, s: usize) -> Vec<FlipStep> {
    let (up, lo) = view(eg, from_first);
    let d = up.len();
    let mut out = star_steps(up[0], &lo, lo[d - 1], &up, s);
    let back = star_steps(lo[0], &up, up[d - 1], &lo, s);
    out.extend(back.iter().rev().map(|f| FlipStep {
        removed: f.inserted,
        inserted: f.removed,
    }));
    out
}

/// Flips joining the wire center of `v` to the two first chain points of
/// `eg` (seen from `v`), applied to `t`.
fn reach(t: &mut Triangulation, g: &VertexGadget, eg: &EdgeGadget, from_first: bool) -> Result<Vec<FlipStep>, ReductionError> {
    let (up, lo) = view(eg, from_first);
    let s = g.center;
    let hint = Some(g.wiring_left[0]);
    let mut steps = insert_segment(t, s, up[0], hint)?;
    steps.extend(insert_segment(t, s, lo[0], hint)?);
    let face = t.apex_left(s, lo[0]) == Some(up[0]) || t.apex_left(up[0], s) == Some(lo[0]);
    if !face {
        return Err(ReductionError::invariant(
            "reach",
            format!("wire center {s} does not close a triangle with the chain ends {} {}", up[0], lo[0]),
        ));
    }
    Ok(steps)
}

fn incident_edges(inst: &ReductionInstance, v: usize) -> Vec<usize> {
    (0..inst.edge_gadgets.len())
        .filter(|&i| inst.edge_gadgets[i].first == v || inst.edge_gadgets[i].second == v)
        .collect()
}

/// Reach cost (flips) of every (vertex, incident edge) pair, measured from
/// `t1` with the vertex's wiring flipped away.
pub fn measure_reach(
    t1: &Triangulation,
    vertex_gadgets: &[VertexGadget],
    edge_gadgets: &[EdgeGadget],
) -> Result<Vec<(usize, usize, usize)>, ReductionError> {
    let mut t = t1.clone();
    let mut out = Vec::new();
    for (v, g) in vertex_gadgets.iter().enumerate() {
        let open = open_wiring(&mut t, g)?;
        for (ei, eg) in edge_gadgets.iter().enumerate() {
            if eg.first != v && eg.second != v {
                continue;
            }
            let steps = reach(&mut t, g, eg, eg.first == v)?;
            out.push((v, ei, steps.len()));
            let mut sink = Vec::new();
            undo(&mut t, &steps, &mut sink)?;
        }
        let mut sink = Vec::new();
        undo(&mut t, &open, &mut sink)?;
    }
    Ok(out)
}

/// Flip sequence from `T1` to `T2` guided by the vertex cover `cover`: for
/// each cover vertex, flip its wiring away, transform every incident edge
/// center not yet transformed through the wire center, and restore the wiring.
pub fn cover_to_flips(inst: &ReductionInstance, cover: &[usize]) -> Result<FlipSequence, ReductionError> {
    let n = inst.vertex_gadgets.len();
    let mut cov: Vec<usize> = cover.to_vec();
    cov.sort_unstable();
    cov.dedup();
    if let Some(&v) = cov.iter().find(|&&v| v >= n) {
        return Err(ReductionError::NoSuchVertex(v));
    }
    let mut in_cover = vec![false; n];
    for &v in &cov {
        in_cover[v] = true;
    }
    for eg in &inst.edge_gadgets {
        if !in_cover[eg.first] && !in_cover[eg.second] {
            return Err(ReductionError::UncoveredEdge(eg.first, eg.second));
        }
    }
    let mut t = inst.t1.clone();
    let mut out: Vec<FlipStep> = Vec::new();
    let mut done = vec![false; inst.edge_gadgets.len()];
    for &v in &cov {
        let g = &inst.vertex_gadgets[v];
        let open = open_wiring(&mut t, g)?;
        out.extend(&open);
        for ei in incident_edges(inst, v) {
            if done[ei] {
                continue;
            }
            let eg = &inst.edge_gadgets[ei];
            let from_first = eg.first == v;
            let steps = reach(&mut t, g, eg, from_first)?;
            out.extend(&steps);
            apply(&mut t, &transform_steps(eg, from_first, g.center), &mut out)?;
            undo(&mut t, &steps, &mut out)?;
            done[ei] = true;
        }
        undo(&mut t, &open, &mut out)?;
    }
    if t != inst.t2 {
        return Err(ReductionError::invariant("cover_to_flips", "sequence does not end at the target"));
    }
    Ok(FlipSequence::new(out))
}

/// Extracts a vertex cover from a flip sequence `T1 -> T2`: the vertices
/// whose zig-zag edges were all absent at some moment. A sequence of length
/// at least `(d - 1)^2` yields the trivial cover.
pub fn flips_to_cover(inst: &ReductionInstance, seq: &FlipSequence) -> Result<Vec<usize>, ReductionError> {
    let n = inst.vertex_gadgets.len();
    let mut owner: FxHashMap<Edge, usize> = FxHashMap::default();
    let mut present = vec![0usize; n];
    for (v, g) in inst.vertex_gadgets.iter().enumerate() {
        for &e in &g.zigzag {
            owner.insert(e, v);
        }
        present[v] = g.zigzag.len();
    }
    let mut opened = vec![false; n];
    let mut t = inst.t1.clone();
    for (i, s) in seq.steps.iter().enumerate() {
        t.apply_step_in_place(i, s)?;
        if let Some(&v) = owner.get(&s.removed) {
            present[v] -= 1;
            if present[v] == 0 {
                opened[v] = true;
            }
        }
        if let Some(&v) = owner.get(&s.inserted) {
            present[v] += 1;
        }
    }
    if t != inst.t2 {
        return Err(ReductionError::NonConforming("the sequence does not end at the target triangulation".into()));
    }
    let d = inst.params.d;
    if seq.len() >= (d - 1) * (d - 1) {
        return Ok((0..n).collect());
    }
    let cover: Vec<usize> = (0..n).filter(|&v| opened[v]).collect();
    for eg in &inst.edge_gadgets {
        if !opened[eg.first] && !opened[eg.second] {
            return Err(ReductionError::NonConforming(format!(
                "edge center ({}, {}) changed without an opened wiring",
                eg.first, eg.second
            )));
        }
    }
    let per = 4 * inst.params.w - 2;
    if cover.len() > seq.len() / per {
        return Err(ReductionError::NonConforming(format!(
            "{} wirings opened by {} flips",
            cover.len(),
            seq.len()
        )));
    }
    Ok(cover)
}
