//! Building Koch-type sets.
//!
//! An [`AngleSchedule`] assigns a base angle to every dyadic cap index; the
//! recursive construction erects an isosceles triangular cap on each stage
//! segment and replaces the segment by the cap's two equal sides. The
//! resulting [`CapTree`] exposes stage polylines, edge points (every vertex
//! ever created), exclusion balls around edge points, deterministic point
//! samplers for the limit set, a small gallery of reference sets, and the
//! two-map iterated function system of the constant-angle curve.

mod gallery;
mod ifs;
mod schedule;
mod tree;

pub use gallery::{gallery, BoundingBox, GallerySet};
pub use ifs::{ifs_maps_gamma, open_set_gamma, AffineMap};
pub use schedule::{AngleSchedule, DyadicIndex, TableEntry, TableSchedule, TailDecl, MAX_THETA};
pub use tree::{
    build_tree, cap_on_segment, densify_polyline, edge_ball_spec, edge_points, sample_limit_set,
    Cap, CapTree, EdgeBallSpec, Polyline, DEPTH_GUARD,
};
