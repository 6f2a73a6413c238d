//! Triangulations of planar point sets under edge flips.
//!
//! The crate covers exact rational geometry, triangulation data structures,
//! exact flip-distance search, double-chain constructions, and a generator
//! for vertex-cover reduction instances together with the compilers between
//! vertex covers and flip sequences.

pub mod geometry;
pub mod pointset;

pub use geometry::{
    cauchy_root_bound, farey_search, general_position, in_circle, orientation,
    secant_second_intersection, segments_properly_cross, unit_circle_point, Circle,
    CirclePosition, GeometryError, Orientation, Point, Rational,
};
pub use pointset::{PointSet, PointSetError};
pub mod triangulation;

pub use triangulation::{
    complete_to_triangulation, unavoidable_edges, validate_triangulation, Edge, FlipSequence,
    FlipStep, Triangulation, TriangulationError, Violation,
};
pub mod search;

pub use search::{
    crossing_count, enumerate_flip_graph, flip_distance, lawson_to_delaunay, Distance,
    DistanceResult, FlipGraph, SearchError,
};
pub mod double_chain;

pub use double_chain::{
    build_double_chain, classify_point, inversion_distance, kernel_steiner_sequence,
    edge_images, label_sequence, stabbed_triangles, local_triangulation, DoubleChain, DoubleChainError, Frame, LabelSequence,
    LocalTriangulation, PointClass, WedgeKernel,
};
pub mod formats;
pub mod reduction;

pub use reduction::{
    assemble, assemble_with, cover_to_flips, flips_to_cover, min_vertex_cover, CubicGraph, ReductionConfig,
    ReductionError, ReductionInstance,
};
pub use formats::{
    parse_point_set, parse_sequence, serialize_flip_graph, parse_triangulation, serialize_point_set, serialize_sequence,
    serialize_triangulation, FormatError,
};
