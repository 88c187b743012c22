//! Centralized numeric tolerances.
//!
//! Every comparison threshold used by the library is defined here with its
//! rationale, so there are no ad-hoc magic numbers at call sites.

/// Default absolute tolerance for geometric coincidence tests.
///
/// Coordinates stay O(1) (the root base is the unit segment), so 1e-9 allows
/// ~6 decimal digits of accumulated rounding across a depth-20 recursion of
/// exact-formula steps while remaining far below any constructed feature size.
pub const GEOM_ABS: f64 = 1e-9;

/// Tolerance for identities that hold to within a handful of ulps.
///
/// Used for frame round-trips, unit-vector norms, and telescoping products,
/// where each step is a single multiplication/rotation: error stays within a
/// few hundred ulps of 1, comfortably below 1e-12.
pub const EXACT_F64: f64 = 1e-12;

/// Residual tolerance for the bisection root of the similarity-dimension
/// equation. The residual is scale-free (the equation is Σ rᵢᴰ = 1), so it
/// can be driven close to machine precision.
pub const MORAN_RESIDUAL: f64 = 1e-13;

/// Agreement required between the exact min-max line fitters and the dense
/// angle-grid oracle used in tests. The width function is a max of
/// sinusoids whose minimum usually sits at a kink (a two-point tie), so a
/// bare 1e5-entry grid resolves it only to slope × grid step ≈ 1e-5 × cloud
/// radius; the oracle therefore adds a ternary refinement inside the winning
/// grid cell, after which 1e-6 has orders of magnitude of slack.
pub const FITTER_VS_GRID: f64 = 1e-6;

/// Increment threshold below which an infinite product of (cos θ)⁻¹ factors
/// is considered converged when no closed form exists.
pub const PRODUCT_CONVERGENCE: f64 = 1e-15;

/// Factor by which the sample resolution (deepest segment length or point
/// spacing) must be finer than the smallest box-counting scale.
pub const BOX_RESOLUTION_FACTOR: f64 = 4.0;

/// Truncation threshold for the countable line families in the gallery:
/// members are enumerated until consecutive lines are closer than this
/// inside the requested bounding box, so every omitted line is within this
/// distance of its nearest neighbor in the family.
pub const GALLERY_OMIT: f64 = 1e-6;
