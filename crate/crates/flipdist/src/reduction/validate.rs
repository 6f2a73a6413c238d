//! Structural checks on an assembled instance.

use super::assemble::excess_constant;
use super::layout::circles_separated;
use super::{EdgeGadget, ReductionInstance};
use crate::geometry::Orientation;
use crate::pointset::PointSet;
use crate::triangulation::{validate_triangulation, Edge, Triangulation};
use std::fmt;

/// Point sets up to this size also get the exhaustive collinearity scan.
pub const FULL_SCAN_LIMIT: usize = 4000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

fn record(out: &mut Vec<CheckResult>, name: &'static str, r: Result<String, String>) {
    let (passed, detail) = match r {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    out.push(CheckResult { name, passed, detail });
}

/// Runs every check; none of them stops the others.
pub fn run_checks(inst: &ReductionInstance) -> ValidationReport {
    let ps = &inst.point_set;
    let n = inst.graph.vertex_count();
    let m = inst.graph.edge_count();
    let mut out = Vec::new();

    record(
        &mut out,
        "certificate",
        inst.certificate.verify(ps).map(|()| {
            format!(
                "prime {}, {} gridded points in {} families, {} exceptional",
                inst.certificate.prime,
                inst.certificate.bulk_count(),
                inst.certificate.families.len(),
                inst.certificate.exceptional.len()
            )
        }),
    );
    record(
        &mut out,
        "general_position_scan",
        if ps.len() <= FULL_SCAN_LIMIT {
            ps.check_general_position()
                .map(|()| format!("{} points scanned", ps.len()))
                .map_err(|e| e.to_string())
        } else {
            Ok(format!("{} points: covered by the certificate", ps.len()))
        },
    );
    record(&mut out, "triangulations", {
        let mut r = Ok("T1 and T2 valid".to_string());
        for (t, name) in [(&inst.t1, "T1"), (&inst.t2, "T2")] {
            if let Err(v) = validate_triangulation(ps, &t.edges_sorted()) {
                r = Err(format!("{name}: {v}"));
                break;
            }
        }
        r
    });
    let want = ps.triangulation_edge_count();
    record(
        &mut out,
        "edge_counts",
        if inst.t1.edge_count() == want && inst.t2.edge_count() == want {
            Ok(format!("{want} edges each"))
        } else {
            Err(format!("expected {want}, T1 has {}, T2 has {}", inst.t1.edge_count(), inst.t2.edge_count()))
        },
    );
    record(
        &mut out,
        "inequalities",
        if inst.overridden {
            Ok("skipped: chain sizes overridden".into())
        } else {
            inst.params.check_inequalities(n, m).map(|()| {
                let p = &inst.params;
                format!("d = {}, w = {}, x = {}, c = {}, tau = {}", p.d, p.w, p.x, p.c, p.tau)
            })
        },
    );
    record(&mut out, "gadget_edges", gadget_edges(inst));
    record(&mut out, "double_chains", {
        let mut r = Ok(format!("{} chains", inst.edge_gadgets.len()));
        for (i, eg) in inst.edge_gadgets.iter().enumerate() {
            if let Err(e) = eg.chain.validate_shape() {
                r = Err(format!("edge {i}: {e}"));
                break;
            }
        }
        r
    });
    record(&mut out, "kernels", kernels(inst));
    record(&mut out, "reach_bound", {
        let c = excess_constant(&inst.reach_costs, n, inst.params.x);
        if c <= inst.params.c {
            Ok(format!("measured excess {c} <= c = {}", inst.params.c))
        } else {
            Err(format!("measured excess {c} > c = {}", inst.params.c))
        }
    });
    let centers: Vec<_> = inst.vertex_gadgets.iter().map(|g| g.center_point.clone()).collect();
    record(
        &mut out,
        "circles_separated",
        circles_separated(&centers, &inst.params.r_v).map(|()| format!("{n} circles")),
    );
    ValidationReport { checks: out }
}

fn gadget_edges(inst: &ReductionInstance) -> Result<String, String> {
    let both = |e: Edge, what: &str| -> Result<(), String> {
        for (t, name) in [(&inst.t1, "T1"), (&inst.t2, "T2")] {
            if !t.contains(e) {
                return Err(format!("{what} edge {e} missing from {name}"));
            }
        }
        Ok(())
    };
    let mut count = 0;
    for g in &inst.vertex_gadgets {
        for e in g.edges() {
            both(e, "wiring")?;
            count += 1;
        }
    }
    for c in &inst.crossings {
        for i in 0..4 {
            both(Edge::new(c.corners[i], c.corners[(i + 1) % 4]), "crossing")?;
        }
        both(c.diagonal, "crossing")?;
        count += 5;
    }
    for eg in &inst.edge_gadgets {
        for e in eg.chain.boundary_edges() {
            both(e, "chain")?;
            count += 1;
        }
        let only = |t: &Triangulation, list: Vec<Edge>, name: &str| -> Result<usize, String> {
            let k = list.len();
            for e in list {
                if !t.contains(e) {
                    return Err(format!("chain diagonal {e} missing from {name}"));
                }
            }
            Ok(k)
        };
        count += only(&inst.t1, eg.t1_diagonals(), "T1")?;
        count += only(&inst.t2, eg.t2_diagonals(), "T2")?;
    }
    Ok(format!("{count} edges present"))
}

fn in_kernel(ps: &PointSet, eg: &EdgeGadget, p: usize) -> bool {
    let c = &eg.chain;
    let d = c.n;
    ps.orient(c.u(0), c.u(1), p) == Orientation::Right
        && ps.orient(c.u(d - 2), c.u(d - 1), p) == Orientation::Right
        && ps.orient(c.l(0), c.l(1), p) == Orientation::Left
        && ps.orient(c.l(d - 2), c.l(d - 1), p) == Orientation::Left
}

/// Inside the quadrilateral `l_1 l_d u_d u_1`, which contains the chain polygon.
fn in_hull_quad(ps: &PointSet, eg: &EdgeGadget, p: usize) -> bool {
    let c = &eg.chain;
    let d = c.n;
    let cyc = [c.l(0), c.l(d - 1), c.u(d - 1), c.u(0)];
    (0..4).all(|i| ps.orient(cyc[i], cyc[(i + 1) % 4], p) == Orientation::Left)
}

/// Both wire centers lie in the kernel; no other point lies in the kernel
/// or the chain polygon. The exact polygon test only runs inside the
/// polygon's hull.
fn kernels(inst: &ReductionInstance) -> Result<String, String> {
    let ps = &inst.point_set;
    for (i, eg) in inst.edge_gadgets.iter().enumerate() {
        for v in [eg.first, eg.second] {
            if !in_kernel(ps, eg, v) {
                return Err(format!("edge {i}: wire center {v} is outside the kernel"));
            }
        }
        let c = &eg.chain;
        for p in 0..ps.len() {
            if p == eg.first || p == eg.second || c.contains(p) {
                continue;
            }
            if in_kernel(ps, eg, p) {
                return Err(format!("edge {i}: point {p} lies in the kernel"));
            }
            if in_hull_quad(ps, eg, p) && c.classify_point(ps.point(p)).in_polygon {
                return Err(format!("edge {i}: point {p} lies in the chain polygon"));
            }
        }
    }
    Ok(format!("{} kernels", inst.edge_gadgets.len()))
}
