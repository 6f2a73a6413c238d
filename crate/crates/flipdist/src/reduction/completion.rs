//! Constrained completion: a plane-sweep splits the constraint graph into
//! x-monotone faces, which are then triangulated with the stack algorithm.
//! Regions listed as pre-triangulated are never entered.

use super::ReductionError;
use crate::geometry::Orientation;
use crate::pointset::PointSet;
use crate::triangulation::{sort_ccw, Edge};
use rustc_hash::FxHashSet;

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy)]
struct Gap {
    helper: usize,
    merge: bool,
    skip: bool,
}

fn tri_key(a: usize, b: usize, c: usize) -> [usize; 3] {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}

fn fail(m: impl Into<String>) -> ReductionError {
    ReductionError::Completion(m.into())
}

/// Completes the non-crossing `constraints` to a triangulation of `ps`.
/// Every triangle of `pre_triangles` must be bounded by constraint edges;
/// those regions receive no further edges. The result contains all
/// constraint edges and the convex hull.
pub fn complete(
    ps: &PointSet,
    constraints: &[Edge],
    pre_triangles: &FxHashSet<[usize; 3]>,
) -> Result<Vec<Edge>, ReductionError> {
    let n = ps.len();
    let mut set: FxHashSet<Edge> = constraints.iter().copied().collect();
    // hull edges close the region the sweep works in
    let hull = ps.hull();
    for i in 0..hull.len() {
        set.insert(Edge::new(hull[i], hull[(i + 1) % hull.len()]));
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in &set {
        adj[e.a].push(e.b);
        adj[e.b].push(e.a);
    }
    let order = ps.lex_order();
    let mut rank = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }
    let mut added: Vec<Edge> = Vec::new();
    sweep(ps, &adj, order, &rank, pre_triangles, &mut added)?;
    for e in &added {
        if set.insert(*e) {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
    }
    let mut diagonals = Vec::new();
    for face in bounded_faces(ps, &mut adj)? {
        if face.len() > 3 {
            triangulate_monotone(ps, &rank, &face, &mut diagonals)?;
        }
    }
    set.extend(diagonals);
    let mut out: Vec<Edge> = set.into_iter().collect();
    out.sort_unstable();
    Ok(out)
}

fn sweep(
    ps: &PointSet,
    adj: &[Vec<usize>],
    order: &[usize],
    rank: &[usize],
    pre: &FxHashSet<[usize; 3]>,
    added: &mut Vec<Edge>,
) -> Result<(), ReductionError> {
    // status: edges (left, right) crossing the sweep line, bottom to top;
    // gaps[i] lies between status[i - 1] and status[i]
    let mut status: Vec<(usize, usize)> = Vec::new();
    let mut gaps: Vec<Gap> = vec![Gap {
        helper: NONE,
        merge: false,
        skip: true,
    }];
    for (step, &p) in order.iter().enumerate() {
        let incoming = adj[p].iter().filter(|&&u| rank[u] < rank[p]).count();
        let mut outgoing: Vec<usize> = adj[p].iter().copied().filter(|&u| rank[u] > rank[p]).collect();
        outgoing.sort_by(|&a, &b| {
            if a == b {
                std::cmp::Ordering::Equal
            } else if ps.orient(p, a, b) == Orientation::Left {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        });
        let below = |e: &(usize, usize)| e.1 != p && ps.orient(e.0, e.1, p) == Orientation::Left;
        let i = status.partition_point(below);
        let wedges = |lower: Gap, upper: Gap| -> Vec<Gap> {
            let mut g = vec![Gap {
                helper: p,
                merge: false,
                skip: lower.skip,
            }];
            for w in outgoing.windows(2) {
                g.push(Gap {
                    helper: p,
                    merge: false,
                    skip: pre.contains(&tri_key(p, w[0], w[1])),
                });
            }
            g.push(Gap {
                helper: p,
                merge: false,
                skip: upper.skip,
            });
            g
        };
        let new_edges: Vec<(usize, usize)> = outgoing.iter().map(|&b| (p, b)).collect();
        if incoming == 0 {
            let gap = gaps[i];
            if !gap.skip {
                added.push(Edge::new(gap.helper, p));
            } else if step != 0 {
                return Err(fail(format!("point {p} lies in a closed region")));
            }
            if outgoing.is_empty() {
                gaps[i] = Gap {
                    helper: p,
                    merge: true,
                    skip: gap.skip,
                };
            } else {
                let repl = wedges(gap, gap);
                gaps.splice(i..=i, repl);
                status.splice(i..i, new_edges);
            }
            continue;
        }
        let j = i + incoming - 1;
        if j >= status.len() || status[i..=j].iter().any(|e| e.1 != p) {
            return Err(fail(format!("constraint edges cross near point {p}")));
        }
        for g in &gaps[i..=j + 1] {
            if g.merge && !g.skip && g.helper != NONE {
                added.push(Edge::new(g.helper, p));
            }
        }
        let (lower, upper) = (gaps[i], gaps[j + 1]);
        let repl = if outgoing.is_empty() {
            vec![Gap {
                helper: p,
                merge: true,
                skip: lower.skip && upper.skip,
            }]
        } else {
            wedges(lower, upper)
        };
        gaps.splice(i..=j + 1, repl);
        status.splice(i..=j, new_edges);
    }
    if !status.is_empty() {
        return Err(fail("sweep ended with open edges"));
    }
    Ok(())
}

/// Faces of the plane graph with the unbounded one removed, each as a
/// counterclockwise vertex cycle.
fn bounded_faces(ps: &PointSet, adj: &mut [Vec<usize>]) -> Result<Vec<Vec<usize>>, ReductionError> {
    for (v, list) in adj.iter_mut().enumerate() {
        sort_ccw(ps, v, list);
    }
    let mut seen: Vec<Vec<bool>> = adj.iter().map(|l| vec![false; l.len()]).collect();
    let pos = |adj: &[Vec<usize>], v: usize, u: usize| adj[v].iter().position(|&x| x == u);
    let mut faces = Vec::new();
    for u in 0..adj.len() {
        for k in 0..adj[u].len() {
            if seen[u][k] {
                continue;
            }
            let mut cycle = Vec::new();
            let (mut a, mut ka) = (u, k);
            loop {
                seen[a][ka] = true;
                cycle.push(a);
                let b = adj[a][ka];
                let back = pos(adj, b, a).ok_or_else(|| fail("asymmetric adjacency"))?;
                let deg = adj[b].len();
                // next edge leaves b clockwise from b -> a
                let kb = (back + deg - 1) % deg;
                a = b;
                ka = kb;
                if a == u && ka == k {
                    break;
                }
                if cycle.len() > 4 * adj.len() + 8 {
                    return Err(fail("face walk does not close"));
                }
            }
            let mut uniq = cycle.clone();
            uniq.sort_unstable();
            uniq.dedup();
            let m = cycle.len();
            let lo = (0..m)
                .min_by(|&x, &y| ps.point(cycle[x]).cmp(ps.point(cycle[y])))
                .expect("nonempty face");
            let turn = ps.orient(cycle[(lo + m - 1) % m], cycle[lo], cycle[(lo + 1) % m]);
            if turn != Orientation::Left {
                continue;
            }
            if uniq.len() != m {
                return Err(fail(format!("face through point {} is not simple", cycle[lo])));
            }
            faces.push(cycle);
        }
    }
    Ok(faces)
}

/// Stack triangulation of an x-monotone counterclockwise polygon.
fn triangulate_monotone(
    ps: &PointSet,
    rank: &[usize],
    poly: &[usize],
    out: &mut Vec<Edge>,
) -> Result<(), ReductionError> {
    let n = poly.len();
    let s = (0..n).min_by_key(|&i| rank[poly[i]]).expect("nonempty");
    let t = (0..n).max_by_key(|&i| rank[poly[i]]).expect("nonempty");
    // counterclockwise from the leftmost vertex runs along the lower chain
    let mut upper = vec![false; n];
    let mut i = t;
    while i != s {
        upper[i] = true;
        i = (i + 1) % n;
    }
    upper[t] = false;
    let mut merged: Vec<usize> = (0..n).collect();
    merged.sort_by_key(|&i| rank[poly[i]]);
    // monotone: each chain must appear in rank order
    let mut stack: Vec<usize> = vec![merged[0], merged[1]];
    for &k in &merged[2..n - 1] {
        let v = poly[k];
        let top = *stack.last().expect("stack");
        if upper[k] != upper[top] {
            while stack.len() > 1 {
                let u = stack.pop().expect("stack");
                out.push(Edge::new(v, poly[u]));
            }
            stack.pop();
            stack.push(top);
            stack.push(k);
        } else {
            let mut last = stack.pop().expect("stack");
            while let Some(&u) = stack.last() {
                let o = ps.orient(poly[u], poly[last], v);
                let inside = if upper[k] { o == Orientation::Right } else { o == Orientation::Left };
                if !inside {
                    break;
                }
                out.push(Edge::new(v, poly[u]));
                last = stack.pop().expect("stack");
            }
            stack.push(last);
            stack.push(k);
        }
    }
    let v = poly[merged[n - 1]];
    if stack.len() > 2 {
        for &u in &stack[1..stack.len() - 1] {
            out.push(Edge::new(v, poly[u]));
        }
    }
    if merged[n - 1] != t {
        return Err(fail("monotone polygon bookkeeping"));
    }
    Ok(())
}
