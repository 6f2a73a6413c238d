use flipdist::geometry::{orientation, Orientation, Point, Rational};
use flipdist::reduction::io::{read_instance, write_instance, write_params, read_params};
use flipdist::reduction::layout::{line_intersection, polygon_denominator_cap};
use flipdist::reduction::{
    assemble_with, choose_parameters, compute_clearances, cover_to_flips, embed_polygon, flips_to_cover,
    min_vertex_cover, min_vertex_cover_bruteforce, run_checks, CubicGraph, Drawing, ReductionConfig,
    ReductionError, ReductionInstance,
};
use flipdist::{validate_triangulation, Edge, FlipSequence};
use num_traits::{One, Signed};
use proptest::prelude::*;
use std::collections::HashSet;
use std::sync::OnceLock;

fn k4_small() -> &'static ReductionInstance {
    static INST: OnceLock<ReductionInstance> = OnceLock::new();
    INST.get_or_init(|| assemble_with(&CubicGraph::complete4(), &ReductionConfig::small(3, 2)).unwrap())
}

/// Chains long enough that compiled sequences stay below `(d-1)^2`, so
/// extraction does not fall back to all vertices.
fn k4_roomy() -> &'static ReductionInstance {
    static INST: OnceLock<ReductionInstance> = OnceLock::new();
    INST.get_or_init(|| assemble_with(&CubicGraph::complete4(), &ReductionConfig::small(40, 2)).unwrap())
}

/// Subset enumeration, independent of the library's branch and bound.
fn cover_oracle(g: &CubicGraph) -> usize {
    let n = g.vertex_count();
    (0u32..1 << n)
        .filter(|mask| g.edges().iter().all(|&(u, v)| mask >> u & 1 == 1 || mask >> v & 1 == 1))
        .map(|mask| mask.count_ones() as usize)
        .min()
        .unwrap()
}

fn all_covers(g: &CubicGraph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    (0u32..1 << n)
        .map(|mask| (0..n).filter(|&v| mask >> v & 1 == 1).collect::<Vec<_>>())
        .filter(|c| g.is_cover(c))
        .collect()
}

#[test]
fn minimum_cover_oracles() {
    for (g, k) in [
        (CubicGraph::complete4(), 3),
        (CubicGraph::petersen(), 6),
        (CubicGraph::k33(), 3),
        (CubicGraph::cube(), 4),
    ] {
        assert_eq!(cover_oracle(&g), k);
        assert_eq!(min_vertex_cover_bruteforce(&g).unwrap(), k);
        let c = min_vertex_cover(&g).unwrap();
        assert_eq!(c.len(), k);
        assert!(g.is_cover(&c));
    }
}

#[test]
fn graphs_must_be_cubic() {
    assert!(matches!(CubicGraph::new(4, vec![(0, 1), (1, 2), (2, 3)]), Err(ReductionError::NotCubic(_))));
    assert!(CubicGraph::new(4, vec![(0, 1), (0, 1), (0, 2), (1, 3), (2, 3), (2, 3)]).is_err());
    let g: CubicGraph = "4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n".parse().unwrap();
    assert_eq!(g, CubicGraph::complete4());
    assert_eq!(g.to_string().parse::<CubicGraph>().unwrap(), g);
    assert!(matches!("4 7\n0 1\n".parse::<CubicGraph>(), Err(ReductionError::Parse { .. })));
}

fn concurrent_diagonals(pts: &[Point]) -> Option<(usize, usize, usize)> {
    let n = pts.len();
    let mut segs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            segs.push((a, b));
        }
    }
    let hit = |s: (usize, usize), t: (usize, usize)| -> Option<Point> {
        if s.0 == t.0 || s.0 == t.1 || s.1 == t.0 || s.1 == t.1 {
            return None;
        }
        let (p, q, r, u) = (&pts[s.0], &pts[s.1], &pts[t.0], &pts[t.1]);
        flipdist::segments_properly_cross((p, q), (r, u)).then(|| line_intersection(p, q, r, u).unwrap())
    };
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            let Some(x) = hit(segs[i], segs[j]) else { continue };
            for k in j + 1..segs.len() {
                let (a, b) = segs[k];
                if a == segs[i].0 || a == segs[i].1 || b == segs[i].0 || b == segs[i].1 {
                    continue;
                }
                if a == segs[j].0 || a == segs[j].1 || b == segs[j].0 || b == segs[j].1 {
                    continue;
                }
                if orientation(&pts[a], &pts[b], &x) == Orientation::Collinear {
                    return Some((i, j, k));
                }
            }
        }
    }
    None
}

#[test]
fn embedded_polygons_are_exact_and_generic() {
    let mut last_bits = 0;
    for n in 5..=10 {
        let pts = embed_polygon(n).unwrap();
        assert_eq!(pts.len(), n);
        let cap = polygon_denominator_cap(n);
        for p in &pts {
            assert_eq!(&p.x * &p.x + &p.y * &p.y, Rational::one());
            assert!(p.x.denom() <= &cap && p.y.denom() <= &cap);
        }
        for i in 0..n {
            let (a, b, c) = (&pts[i], &pts[(i + 1) % n], &pts[(i + 2) % n]);
            assert_eq!(orientation(a, b, c), Orientation::Left, "n = {n} not convex at {i}");
        }
        assert_eq!(concurrent_diagonals(&pts), None, "n = {n}");
        let bits = pts.iter().map(|p| p.x.denom().bits().max(p.y.denom().bits())).max().unwrap();
        assert!(bits >= last_bits, "denominator bits shrank at n = {n}");
        last_bits = bits;
    }
}

#[test]
fn clearances_follow_the_minimum_rule() {
    for n in [4, 5, 10] {
        let poly = embed_polygon(n).unwrap();
        let c = compute_clearances(&poly).unwrap();
        assert!(c.delta.is_positive());
        assert_eq!(&c.r_v * Rational::from_integer(6.into()), c.delta);
        let third = &c.delta_e / Rational::from_integer(3.into());
        let want = [third, c.delta_v.clone(), c.delta_n.clone(), c.delta_r.clone()].into_iter().min().unwrap();
        assert_eq!(c.delta, want);
        // pairwise gaps of at least 4 r_V between circles of radius r_V
        let six = &c.r_v * Rational::from_integer(6.into());
        for i in 0..n {
            for j in i + 1..n {
                assert!(poly[i].dist2(&poly[j]) >= &six * &six);
            }
        }
        flipdist::reduction::layout::circles_separated(&poly, &c.r_v).unwrap();
    }
}

#[test]
fn k4_drawing_has_one_crossing() {
    let g = CubicGraph::complete4();
    let d = Drawing::new(&g, &embed_polygon(4).unwrap());
    assert_eq!(d.crossings.len(), 1);
    assert_eq!(d.max_crossings(), 1);
    let inst = k4_small();
    assert_eq!((inst.params.x_prime, inst.params.x), (1, 1));
    assert!(inst.params.x_prime + 5 <= g.edge_count());
    assert_eq!(inst.crossings.len(), 1);
    let corners: HashSet<usize> = inst.crossings[0].corners.into_iter().collect();
    assert_eq!(corners.len(), 4);
}

#[test]
fn small_instance_validates() {
    let inst = k4_small();
    let report = run_checks(inst);
    assert!(report.passed(), "{report}");
    assert!(report.checks.iter().any(|c| c.name == "general_position_scan" && c.detail.contains("scanned")));
}

#[test]
fn single_wiring_point_smoke() {
    let inst = assemble_with(&CubicGraph::complete4(), &ReductionConfig::small(2, 1)).unwrap();
    assert!(run_checks(&inst).passed());
    let seq = cover_to_flips(&inst, &[0, 1, 2]).unwrap();
    assert_eq!(seq.replay(&inst.t1).unwrap(), inst.t2);
}

#[test]
fn triangulations_differ_only_inside_edge_centers() {
    let inst = k4_small();
    let e1: HashSet<Edge> = inst.t1.edges().collect();
    let e2: HashSet<Edge> = inst.t2.edges().collect();
    for e in e1.symmetric_difference(&e2) {
        assert!(
            inst.edge_gadgets.iter().any(|g| g.chain.contains(e.a) && g.chain.contains(e.b)),
            "{e} changes outside every edge center"
        );
    }
}

#[test]
fn gadget_points_lie_on_their_circles() {
    let inst = k4_small();
    let ps = &inst.point_set;
    for g in &inst.vertex_gadgets {
        let r2 = &g.radius * &g.radius;
        for &p in g.circle_points().iter() {
            assert_eq!(ps.point(p).dist2(&g.center_point), r2);
        }
        assert_eq!(g.wiring_left.len(), inst.params.w);
    }
    for eg in &inst.edge_gadgets {
        for (side, arc) in [(&eg.chain.upper, &eg.arcs[0]), (&eg.chain.lower, &eg.arcs[1])] {
            for &p in side.iter() {
                assert_eq!(ps.point(p).dist2(&arc.center), arc.radius2);
            }
        }
    }
}

#[test]
fn tunnel_ports_face_each_other() {
    let inst = k4_small();
    let ps = &inst.point_set;
    for eg in &inst.edge_gadgets {
        let [p_v, q_v, q_w, p_w] = eg.tunnel.map(|i| ps.point(i).clone());
        let (v, w) = (ps.point(eg.first), ps.point(eg.second));
        assert_eq!(orientation(v, &p_w, &p_v), Orientation::Left);
        assert_eq!(orientation(v, &q_w, &q_v), Orientation::Right);
        assert_eq!(orientation(w, &p_v, &p_w), Orientation::Right);
        assert_eq!(orientation(w, &q_v, &q_w), Orientation::Left);
    }
}

#[test]
fn wiring_segments_cut_off_the_center() {
    let inst = k4_small();
    let ps = &inst.point_set;
    for g in &inst.vertex_gadgets {
        let v = &g.center_point;
        for &l in &g.wiring_left {
            for &r in &g.wiring_right {
                let (a, b) = (ps.point(l), ps.point(r));
                let side_v = orientation(a, b, v);
                assert_ne!(side_v, Orientation::Collinear);
                for &p in &g.ports {
                    let side_p = orientation(a, b, ps.point(p));
                    assert!(side_p != side_v && side_p != Orientation::Collinear, "port {p} on the center's side");
                }
            }
        }
    }
}

#[test]
fn side_points_keep_their_order_around_wire_centers() {
    let inst = k4_small();
    let ps = &inst.point_set;
    for eg in &inst.edge_gadgets {
        for side in [&eg.upper_side, &eg.lower_side] {
            for c in [eg.first, eg.second] {
                let turns: HashSet<Orientation> = side
                    .windows(2)
                    .map(|w| orientation(ps.point(c), ps.point(w[0]), ps.point(w[1])))
                    .collect();
                assert_eq!(turns.len(), 1, "side {side:?} is not angularly sorted around {c}");
                assert!(!turns.contains(&Orientation::Collinear));
            }
        }
    }
}

#[test]
fn crossing_points_are_outside_every_edge_center() {
    let inst = k4_small();
    let ps = &inst.point_set;
    for c in &inst.crossings {
        for &p in &c.corners {
            for eg in &inst.edge_gadgets {
                assert!(flipdist::classify_point(&eg.chain, ps.point(p)).is_outside());
            }
        }
    }
}

fn replay_checked(inst: &ReductionInstance, seq: &FlipSequence) {
    let mut t = inst.t1.clone();
    for (i, step) in seq.steps.iter().enumerate() {
        let got = t.flip_in_place(step.removed).unwrap();
        assert_eq!(got.inserted, step.inserted, "step {i}");
        validate_triangulation(&inst.point_set, &t.edges_sorted()).unwrap();
    }
    assert_eq!(t, inst.t2);
}

#[test]
fn every_cover_compiles_and_every_prefix_validates() {
    let inst = k4_small();
    for cover in all_covers(&inst.graph) {
        let seq = cover_to_flips(inst, &cover).unwrap();
        assert!(seq.len() as u128 <= inst.delta_bound(cover.len()), "cover {cover:?}");
        replay_checked(inst, &seq);
    }
}

#[test]
fn compiled_length_matches_the_schedule() {
    let inst = k4_small();
    let p = &inst.params;
    let cover = vec![0, 1, 2];
    let seq = cover_to_flips(inst, &cover).unwrap();
    // per cover vertex: open and close the wiring; per edge: walk in,
    // swap the chain diagonals, walk out
    let mut want = cover.len() * 2 * (2 * p.w - 1);
    let mut done = HashSet::new();
    for &v in &cover {
        for e in inst.graph.incident(v) {
            if done.insert(e) {
                let reach = inst.reach_costs.iter().find(|r| r.0 == v && r.1 == e).unwrap().2;
                want += 2 * reach + 4 * p.d - 4;
            }
        }
    }
    assert_eq!(seq.len(), want);
}

#[test]
fn round_trip_returns_a_small_cover() {
    let inst = k4_roomy();
    let d = inst.params.d;
    for cover in all_covers(&inst.graph) {
        let seq = cover_to_flips(inst, &cover).unwrap();
        assert!(seq.len() < (d - 1) * (d - 1));
        let back = flips_to_cover(inst, &seq).unwrap();
        assert!(inst.graph.is_cover(&back));
        assert!(back.len() <= cover.len(), "{cover:?} came back as {back:?}");
        assert!(back.len() <= seq.len() / (4 * inst.params.w - 2));
    }
}

#[test]
fn compile_rejects_bad_covers() {
    let inst = k4_small();
    assert!(matches!(cover_to_flips(inst, &[0, 1]), Err(ReductionError::UncoveredEdge(..))));
    assert!(matches!(cover_to_flips(inst, &[0, 1, 9]), Err(ReductionError::NoSuchVertex(9))));
}

#[test]
fn extraction_rejects_short_or_wrong_sequences() {
    let inst = k4_small();
    assert!(matches!(
        flips_to_cover(inst, &FlipSequence::new(Vec::new())),
        Err(ReductionError::NonConforming(_))
    ));
    let seq = cover_to_flips(inst, &[0, 1, 2]).unwrap();
    let cut = FlipSequence::new(seq.steps[..seq.len() / 2].to_vec());
    assert!(flips_to_cover(inst, &cut).is_err());
}

#[test]
fn instance_text_round_trip() {
    let inst = k4_small();
    let text = write_instance(inst);
    let back = read_instance(&text).unwrap();
    assert_eq!(back.point_set.points(), inst.point_set.points());
    assert_eq!(back.t1, inst.t1);
    assert_eq!(back.t2, inst.t2);
    assert_eq!(back.params, inst.params);
    assert_eq!(back.certificate, inst.certificate);
    assert_eq!(back.reach_costs, inst.reach_costs);
    assert_eq!(write_instance(&back), text);
    assert!(run_checks(&back).passed());

    let pts = flipdist::formats::serialize_points(inst.point_set.points());
    assert_eq!(flipdist::formats::parse_points(&pts).unwrap(), inst.point_set.points());
}

#[test]
fn params_file_lists_the_layout() {
    let inst = k4_small();
    let kv = read_params(&write_params(inst, Some(3))).unwrap();
    let get = |k: &str| kv.iter().find(|(a, _)| a == k).map(|(_, b)| b.clone()).unwrap();
    assert_eq!(get("x_prime"), "1");
    assert_eq!(get("d"), inst.params.d.to_string());
    assert_eq!(get("w"), inst.params.w.to_string());
    assert_eq!(get("delta_num/den"), inst.params.delta.to_string());
    assert_eq!(get("delta_k"), inst.delta_bound(3).to_string());
}

#[test]
fn denominators_grow_with_the_graph() {
    let mut last = 0;
    for g in [CubicGraph::complete4(), CubicGraph::k33(), CubicGraph::cube(), CubicGraph::petersen()] {
        let n = g.vertex_count();
        let inst = assemble_with(&g, &ReductionConfig::small(2, 1)).unwrap();
        let bits = inst
            .point_set
            .points()
            .iter()
            .map(|p| p.x.denom().bits().max(p.y.denom().bits()))
            .max()
            .unwrap();
        let poly_bits = (0..n)
            .map(|v| {
                let p = inst.point_set.point(inst.vertex_gadgets[v].center);
                p.x.denom().bits().max(p.y.denom().bits())
            })
            .max()
            .unwrap();
        assert!(poly_bits <= polygon_denominator_cap(n).bits());
        assert!(bits >= last, "n = {n}: {bits} bits after {last}");
        last = bits;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn chosen_parameters_satisfy_both_inequalities(n in 2usize..40, x in 0usize..20, c in 0usize..40) {
        let n = n * 2;
        let m = 3 * n / 2;
        let (d, w, tau) = choose_parameters(n, m, x, c);
        prop_assert_eq!(tau, c * n);
        prop_assert_eq!(w, m * (4 * x + 2 * d) + tau + 1);
        let lhs = ((d - 1) * (d - 1)) as u128;
        let rhs = |d: usize| 2 * (n * (2 * (m * (4 * x + 2 * d) + tau + 1) - 1) + m * (4 * x + 2 * d) + tau) as u128;
        prop_assert!(lhs > rhs(d));
        // minimal: d - 1 fails with its own w
        let prev = ((d - 2) * (d - 2)) as u128;
        prop_assert!(prev <= rhs(d - 1));
    }

    #[test]
    fn supersets_of_a_cover_compile(extra in proptest::collection::vec(0usize..4, 0..4)) {
        let inst = k4_small();
        let mut cover = vec![0, 1, 2];
        cover.extend(extra);
        cover.sort_unstable();
        cover.dedup();
        let seq = cover_to_flips(inst, &cover).unwrap();
        prop_assert!(seq.len() as u128 <= inst.delta_bound(cover.len()));
        prop_assert_eq!(seq.replay(&inst.t1).unwrap(), inst.t2.clone());
    }
}
