//! Reduction from cubic minimum vertex cover: instance generation with exact
//! rational coordinates, and the compilers between covers and flip sequences.
//!
//! Pipeline: convex embedding of the graph, clearances, tunnel endpoints,
//! arc circles and edge-center intervals, crossing points, a modular
//! general-position certificate, gridded wiring and edge-center points, and a
//! sweep-line completion shared by both triangulations.

pub mod arcs;
pub mod certificate;
pub mod compile;
pub mod completion;
pub mod crossing;
pub mod graph;
pub mod io;
pub mod layout;
pub mod param;
pub mod tunnel;
pub mod validate;
pub mod wiring;

mod assemble;

pub use arcs::ArcDesc;
pub use assemble::{assemble, assemble_cached, assemble_in_cache, assemble_with, choose_parameters, Skeleton};
pub use certificate::GpCertificate;
pub use compile::{cover_to_flips, flips_to_cover, insert_segment};
pub use graph::{min_vertex_cover, min_vertex_cover_bruteforce, CubicGraph};
pub use layout::{compute_clearances, embed_polygon, Clearances, Drawing};
pub use validate::{run_checks, CheckResult, ValidationReport};

use crate::double_chain::{DoubleChain, DoubleChainError};
use crate::formats::FormatError;
use crate::geometry::{Point, Rational};
use crate::pointset::{PointSet, PointSetError};
use crate::triangulation::{Edge, Triangulation, TriangulationError};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("not a simple cubic graph: {0}")]
    NotCubic(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("graph too large for the exact oracle: n = {0}")]
    TooLarge(usize),
    #[error("layout: {0}")]
    Layout(String),
    #[error("parameter search: {0}")]
    Search(String),
    #[error("tunnel too crowded: {0}")]
    TunnelTooCrowded(String),
    #[error("no admissible candidate: {0}")]
    NoCandidate(String),
    #[error("general-position certificate: {0}")]
    Certificate(String),
    #[error("completion: {0}")]
    Completion(String),
    #[error("invariant `{name}` failed: {detail}")]
    Invariant { name: String, detail: String },
    #[error("uncovered edge ({0}, {1})")]
    UncoveredEdge(usize, usize),
    #[error("non-conforming sequence: {0}")]
    NonConforming(String),
    #[error("vertex {0} is not in the graph")]
    NoSuchVertex(usize),
    #[error("instance io: {0}")]
    Io(String),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    PointSet(#[from] PointSetError),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
    #[error(transparent)]
    DoubleChain(#[from] DoubleChainError),
}

impl ReductionError {
    pub(crate) fn invariant(name: &str, detail: impl Into<String>) -> Self {
        ReductionError::Invariant {
            name: name.to_string(),
            detail: detail.into(),
        }
    }
}

/// Knobs of the generator. The defaults produce the instances the inequality
/// checks are stated for.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReductionConfig {
    /// Safety factor of the Stern–Brocot denominator cap.
    pub farey_cap_multiplier: u32,
    /// Largest prime tried for the general-position certificate.
    pub prime_start: u64,
    /// Replaces the chosen `(d, w)`; such instances skip the inequality
    /// checks and exist to make exhaustive per-step validation affordable.
    pub override_dw: Option<(usize, usize)>,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        ReductionConfig {
            farey_cap_multiplier: 4,
            prime_start: (1u64 << 31) - 1,
            override_dw: None,
        }
    }
}

impl ReductionConfig {
    /// Small chains for tests: `d` edge-center points per chain, `w` wiring
    /// points per chain.
    pub fn small(d: usize, w: usize) -> Self {
        ReductionConfig {
            override_dw: Some((d, w)),
            ..ReductionConfig::default()
        }
    }

    pub fn stable_hash(&self) -> u64 {
        let mut h = graph::Fnv::new();
        h.write_u64(self.farey_cap_multiplier as u64);
        h.write_u64(self.prime_start);
        match self.override_dw {
            Some((d, w)) => {
                h.write_u64(1);
                h.write_u64(d as u64);
                h.write_u64(w as u64);
            }
            None => h.write_u64(0),
        }
        h.finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayoutParams {
    pub delta: Rational,
    pub r_v: Rational,
    pub x_prime: usize,
    pub x: usize,
    pub d: usize,
    pub w: usize,
    pub c: usize,
    pub tau: usize,
}

impl LayoutParams {
    /// `w(d) = m(4x + 2d) + tau + 1`.
    pub fn w_of_d(m: usize, x: usize, d: usize, tau: usize) -> usize {
        m * (4 * x + 2 * d) + tau + 1
    }

    /// `2 (k (2w - 1) + m (4x + 2d) + tau)`.
    pub fn delta_bound(&self, m: usize, k: usize) -> u128 {
        let (k, m) = (k as u128, m as u128);
        let (w, x, d, tau) = (self.w as u128, self.x as u128, self.d as u128, self.tau as u128);
        2 * (k * (2 * w - 1) + m * (4 * x + 2 * d) + tau)
    }

    /// Re-evaluates every stated relation with plain integers.
    pub fn check_inequalities(&self, n: usize, m: usize) -> Result<(), String> {
        let (n, m) = (n as i128, m as i128);
        let (xp, x, d, w, c, tau) = (
            self.x_prime as i128,
            self.x as i128,
            self.d as i128,
            self.w as i128,
            self.c as i128,
            self.tau as i128,
        );
        if x != (xp + 1) / 2 {
            return Err(format!("x = {x} but ceil(x'/2) = {}", (xp + 1) / 2));
        }
        if xp > m - 5 {
            return Err(format!("x' = {xp} exceeds m - 5 = {}", m - 5));
        }
        if tau != c * n {
            return Err(format!("tau = {tau} but c n = {}", c * n));
        }
        // w > m(4x+2d) + tau + 1/2, doubled to stay integral
        if 2 * w <= 2 * (m * (4 * x + 2 * d) + tau) + 1 {
            return Err(format!("w = {w} violates w > m(4x+2d) + tau + 1/2"));
        }
        let lhs = (d - 1) * (d - 1);
        let rhs = 2 * (n * (2 * w - 1) + m * (4 * x + 2 * d) + tau);
        if lhs <= rhs {
            return Err(format!("(d-1)^2 = {lhs} <= {rhs}"));
        }
        if self.r_v.clone() * Rational::from_integer(6.into()) != self.delta {
            return Err("r_V != delta / 6".into());
        }
        Ok(())
    }
}

/// Wiring gadget of one graph vertex.
#[derive(Debug, Clone)]
pub struct VertexGadget {
    /// Point index of the vertex `v` (the circle center).
    pub center: usize,
    pub center_point: Point,
    pub radius: Rational,
    /// Tunnel endpoints on the circle, counterclockwise.
    pub ports: Vec<usize>,
    /// `l_1 .. l_w`, `l_1` next to the normal line.
    pub wiring_left: Vec<usize>,
    /// `r_1 .. r_w`, `r_1` next to the normal line.
    pub wiring_right: Vec<usize>,
    /// `l_1 r_1, r_1 l_2, l_2 r_2, ..., l_w r_w`.
    pub zigzag: Vec<Edge>,
}

impl VertexGadget {
    /// All points on the circle in counterclockwise order.
    pub fn circle_points(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.wiring_left.clone();
        out.extend(&self.ports);
        out.extend(self.wiring_right.iter().rev());
        out
    }
}

/// The four points placed near the crossings of two tunnels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingGadget {
    pub e: usize,
    pub f: usize,
    /// Counterclockwise corners.
    pub corners: [usize; 4],
    pub diagonal: Edge,
}

#[derive(Debug, Clone)]
pub struct EdgeGadget {
    /// Graph endpoints, `first` with the smaller x-coordinate.
    pub first: usize,
    pub second: usize,
    /// `(p_v, q_v, q_w, p_w)` with `v = first`.
    pub tunnel: [usize; 4],
    /// Upper (left of `first -> second`) and lower arc circles.
    pub arcs: [ArcDesc; 2],
    pub chain: DoubleChain,
    /// Indices into [`ReductionInstance::crossings`].
    pub crossings: Vec<usize>,
    /// Upper side polyline from `p_v` to `p_w`, lower from `q_v` to `q_w`.
    pub upper_side: Vec<usize>,
    pub lower_side: Vec<usize>,
}

impl EdgeGadget {
    /// Edges inside `P_D` in the source triangulation.
    pub fn t1_diagonals(&self) -> Vec<Edge> {
        let c = &self.chain;
        let d = c.n;
        let mut out = Vec::with_capacity(2 * d - 3);
        for j in 1..d {
            out.push(Edge::new(c.u(0), c.l(j)));
        }
        for i in 1..d - 1 {
            out.push(Edge::new(c.l(d - 1), c.u(i)));
        }
        out
    }

    /// Edges inside `P_D` in the target triangulation.
    pub fn t2_diagonals(&self) -> Vec<Edge> {
        let c = &self.chain;
        let d = c.n;
        let mut out = Vec::with_capacity(2 * d - 3);
        for j in 1..d {
            out.push(Edge::new(c.l(0), c.u(j)));
        }
        for i in 1..d - 1 {
            out.push(Edge::new(c.u(d - 1), c.l(i)));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct ReductionInstance {
    pub graph: CubicGraph,
    pub params: LayoutParams,
    pub point_set: Arc<PointSet>,
    pub t1: Triangulation,
    pub t2: Triangulation,
    pub vertex_gadgets: Vec<VertexGadget>,
    pub edge_gadgets: Vec<EdgeGadget>,
    pub crossings: Vec<CrossingGadget>,
    pub certificate: GpCertificate,
    /// Measured reach cost per (vertex, incident edge), see [`compile`].
    pub reach_costs: Vec<(usize, usize, usize)>,
    pub overridden: bool,
}

impl ReductionInstance {
    pub fn delta_bound(&self, k: usize) -> u128 {
        self.params.delta_bound(self.graph.edge_count(), k)
    }
}
