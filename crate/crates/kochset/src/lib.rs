//! Koch-type fractal curves built from base-angle schedules.
//!
//! The library constructs recursive triangular-cap curves (the classic Koch
//! curve and its variable-angle generalizations), and provides the numeric
//! machinery to interrogate them:
//!
//! - [`geometry`] — planar primitives: points, segments, affine lines,
//!   orthonormal frames, cones, and exact min-max line fitting.
//! - [`construction`] — angle schedules, the recursive cap tree, stage
//!   polylines, edge points and their exclusion balls, point samplers, the
//!   counterexample gallery, and the two-map IFS of the constant-angle curve.
//! - [`parametrization`] — the stagewise maps `F_n` from `[0, 1]` onto the
//!   stage polylines, dyadic interval tracking, stretch products, and the
//!   bounded/diverging classification of descent paths.
//! - [`analysis`] — lengths, the Moran equation, closed-form and box-counting
//!   dimension estimators, dyadic measure quadrature, density profiles,
//!   rectifiability reports, centering comparisons, and spiral diagnostics.
//! - [`properties`] — finite-scale verification of the eight plane
//!   approximation properties (flatness profiles, per-property checkers,
//!   local-finiteness scans, delta ladders).
//! - [`io`] — polyline JSON, report JSON, CSV, and SVG serialization.
//! - [`cli`] — the command surface used by the `kochset` binary.
//!
//! All coordinates are `f64`; geometric equality tolerance is 1e-9 absolute
//! unless a function documents otherwise (see [`tol`]).

pub mod analysis;
pub mod cli;
pub mod construction;
pub mod error;
pub mod geometry;
pub mod io;
pub mod parametrization;
pub mod properties;
pub mod tol;

pub use error::{Error, Result};
