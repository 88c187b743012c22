//! Quantitative engines: lengths and the image-measure quadrature, the Moran
//! similarity-dimension equation and closed-form dimensions, box-counting
//! estimation, density profiles, rectifiability reports, tree centering,
//! and spiral (total-turn) diagnostics.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::construction::{AngleSchedule, CapTree, DyadicIndex};
use crate::error::{Error, Result};
use crate::geometry::{point_in_triangle, Point2};
use crate::parametrization::{classify_lambda, descent_product_converges, CellVerdict};
use crate::tol;

/// Sum of segment lengths of one construction stage.
pub fn total_length(tree: &CapTree, stage: u32) -> Result<f64> {
    Ok(tree.polyline(stage)?.total_length())
}

/// The similarity-dimension equation `Σ rᵢᴰ = 1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MoranProblem {
    pub ratios: Vec<f64>,
}

impl MoranProblem {
    /// Validates nonemptiness and each ratio in (0, 1).
    pub fn new(ratios: Vec<f64>) -> Result<Self> {
        if ratios.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        for &r in &ratios {
            if !r.is_finite() || r <= 0.0 || r >= 1.0 {
                return Err(Error::OutOfRange(format!(
                    "similarity ratio must lie in (0, 1), got {r}"
                )));
            }
        }
        Ok(MoranProblem { ratios })
    }
}

/// Solves `Σ rᵢᴰ = 1` for the unique root `D ≥ 0` by bracket-doubling
/// bisection, stopping when the residual drops below
/// [`tol::MORAN_RESIDUAL`]. The residual (not `D`) is controlled: the
/// equation is scale-free so the residual can approach machine precision.
pub fn moran_solve(p: &MoranProblem) -> f64 {
    let f = |d: f64| -> f64 { p.ratios.iter().map(|r| r.powf(d)).sum::<f64>() - 1.0 };
    // f(0) = N - 1 ≥ 0, f decreasing in d (ratios < 1): double until negative.
    let mut hi = 1.0;
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    loop {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v.abs() < tol::MORAN_RESIDUAL || mid == lo || mid == hi {
            return mid;
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Closed-form dimension of a constant-limit-angle schedule: the two-map
/// similarity ratio is `l = (1/2)·sqrt(1 + tan²r) = 1/(2 cos r)`, so the
/// dimension is `-ln 2 / ln l`. Valid while `l < 1`, i.e. `r < π/3`.
pub fn dim_formula_ar(r: f64) -> Result<f64> {
    if !r.is_finite() || !(0.0..std::f64::consts::FRAC_PI_2).contains(&r) {
        return Err(Error::OutOfRange(format!(
            "limit angle {r} outside [0, pi/2)"
        )));
    }
    let l = 0.5 * (1.0 + r.tan() * r.tan()).sqrt();
    if l >= 1.0 {
        return Err(Error::OutOfRange(format!(
            "limit angle {r} gives expansion ratio {l} >= 1; no similarity dimension"
        )));
    }
    Ok(-std::f64::consts::LN_2 / l.ln())
}

/// How a dimension estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimMethod {
    /// Root of the similarity-dimension equation.
    Moran,
    /// Closed form from a constant limit angle.
    AngleFormula,
    /// Least-squares slope of log box counts.
    BoxCounting,
    /// Sandwich from the infimum/supremum limit angles along descent paths.
    LimitAngleBounds,
}

/// Per-scale regression diagnostics of a box-counting fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub scales: Vec<f64>,
    /// Geometric mean of occupied-box counts over the grid-offset lattice;
    /// fractional because of the averaging.
    pub counts: Vec<f64>,
    /// Residuals of log N against the fitted line, one per scale.
    pub residuals: Vec<f64>,
    pub max_abs_residual: f64,
}

/// A dimension estimate with provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub value: f64,
    pub method: DimMethod,
    /// (lower, upper) for the limit-angle sandwich.
    pub bounds: Option<(f64, f64)>,
    pub fit: Option<FitDiagnostics>,
}

/// Box-counting dimension estimate over axis-aligned grids: per scale the
/// occupied-box count is geometric-mean averaged over a deterministic 4x4
/// lattice of grid offsets (a standard variance reduction that suppresses the
/// log-periodic bias of a single anchored grid), then log N is fitted against
/// log(1/s) by ordinary least squares.
///
/// `resolution` is the sample's spatial resolution (deepest segment length
/// or max point spacing); it must be at least
/// [`tol::BOX_RESOLUTION_FACTOR`]× finer than the smallest scale, otherwise
/// counts saturate and the slope is an artifact.
pub fn box_counting_dim(
    points: &[Point2],
    scales: &[f64],
    resolution: f64,
) -> Result<DimensionEstimate> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if scales.len() < 3 {
        return Err(Error::OutOfRange(format!(
            "need at least 3 scales for a slope, got {}",
            scales.len()
        )));
    }
    let mut min_scale = f64::INFINITY;
    for &s in scales {
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::OutOfRange(format!("scale {s} not positive")));
        }
        min_scale = min_scale.min(s);
    }
    if !(resolution >= 0.0) {
        return Err(Error::NonFinite {
            context: "sample resolution",
        });
    }
    if resolution * tol::BOX_RESOLUTION_FACTOR > min_scale {
        return Err(Error::ResolutionTooCoarse {
            resolution,
            scale: min_scale,
            factor: tol::BOX_RESOLUTION_FACTOR,
        });
    }
    let mut xs = Vec::with_capacity(scales.len());
    let mut ys = Vec::with_capacity(scales.len());
    let mut counts = Vec::with_capacity(scales.len());
    // 4x4 offset lattice at cell centers: offsets (i + 1/2) s/4.
    const OFFSETS: u32 = 4;
    for &s in scales {
        let mut log_sum = 0.0;
        for i in 0..OFFSETS {
            for j in 0..OFFSETS {
                let ox = (i as f64 + 0.5) * s / OFFSETS as f64;
                let oy = (j as f64 + 0.5) * s / OFFSETS as f64;
                let mut boxes: HashSet<(i64, i64)> = HashSet::new();
                for p in points {
                    boxes.insert((
                        ((p.x + ox) / s).floor() as i64,
                        ((p.y + oy) / s).floor() as i64,
                    ));
                }
                log_sum += (boxes.len() as f64).ln();
            }
        }
        let log_mean = log_sum / (OFFSETS * OFFSETS) as f64;
        counts.push(log_mean.exp());
        xs.push((1.0 / s).ln());
        ys.push(log_mean);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - (intercept + slope * x))
        .collect();
    let max_abs_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    Ok(DimensionEstimate {
        value: slope,
        method: DimMethod::BoxCounting,
        bounds: None,
        fit: Some(FitDiagnostics {
            scales: scales.to_vec(),
            counts,
            residuals,
            max_abs_residual,
        }),
    })
}

/// Leaf regions of a schedule: fraction of `[0,1]` they occupy and the limit
/// angle of descents through them. Errors when a table leaves part of the
/// parameter interval without a declared parametric tail.
fn limit_angle_regions(schedule: &AngleSchedule) -> Result<Vec<(f64, f64)>> {
    match schedule {
        AngleSchedule::Constant { theta } => Ok(vec![(1.0, *theta)]),
        AngleSchedule::AEps { .. }
        | AngleSchedule::Geometric { .. }
        | AngleSchedule::Power { .. } => Ok(vec![(1.0, 0.0)]),
        AngleSchedule::Table(t) => {
            // Nested anchors would make region accounting ambiguous; the
            // bounds are only offered for cleanly partitioned tails.
            for a in &t.tails {
                for b in &t.tails {
                    if (a.stage, a.cell) != (b.stage, b.cell)
                        && (DyadicIndex { stage: a.stage, cell: a.cell })
                            .descends_from(DyadicIndex { stage: b.stage, cell: b.cell })
                    {
                        return Err(Error::MethodMismatch(
                            "limit-angle bounds need non-nested tail anchors".into(),
                        ));
                    }
                }
            }
            let mut regions = Vec::new();
            let mut covered = 0.0;
            for tail in &t.tails {
                let frac = 0.5f64.powi(tail.stage as i32);
                covered += frac;
                for (f, a) in limit_angle_regions(&tail.schedule)? {
                    regions.push((frac * f, a));
                }
            }
            if (covered - 1.0).abs() > tol::EXACT_F64 {
                return Err(Error::MethodMismatch(format!(
                    "table schedule's declared tails cover fraction {covered} of the base \
                     interval; limit angles are undetermined elsewhere"
                )));
            }
            Ok(regions)
        }
    }
}

/// Dimension sandwich from the limit angles of descent paths: the lower end
/// uses the largest limit angle attained on a positive fraction of the base
/// interval, the upper end the supremum over all paths. For the schedules
/// here every declared region has positive fraction, so the two collapse.
pub fn dim_bounds_koch(tree: &CapTree) -> Result<DimensionEstimate> {
    let regions = limit_angle_regions(tree.schedule())?;
    let gamma2 = regions.iter().fold(0.0f64, |m, (_, a)| m.max(*a));
    let gamma1 = regions
        .iter()
        .filter(|(f, _)| *f > 0.0)
        .fold(0.0f64, |m, (_, a)| m.max(*a));
    let lo = dim_formula_ar(gamma1)?;
    let hi = dim_formula_ar(gamma2)?;
    Ok(DimensionEstimate {
        value: 0.5 * (lo + hi),
        method: DimMethod::LimitAngleBounds,
        bounds: Some((lo, hi)),
        fit: None,
    })
}

/// Convergence flag of an image-measure quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convergence {
    /// The quadrature value converges as the depth grows.
    Converging,
    /// The value grows without bound with depth.
    Diverging,
    /// The schedule carries no parametric tail to decide.
    Undetermined,
}

/// Result of the dyadic image-measure quadrature.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MeasureResult {
    /// `Σ_{stage-n cells ⊂ B} base_length · 2⁻ⁿ · Π̃` — the exact length of
    /// the stage-n image of `B`.
    pub value: f64,
    pub convergence: Convergence,
}

fn cell_measure(
    schedule: &AngleSchedule,
    idx: DyadicIndex,
    n: u32,
    prefix: f64,
) -> Result<f64> {
    if idx.stage == n {
        return Ok(prefix * 0.5f64.powi(n as i32));
    }
    // Fast path: if the angles below idx depend only on the stage, the sum
    // over all 2^(n-s) descendants collapses to one running product.
    let uniform_below = match schedule {
        AngleSchedule::Table(t) => {
            let covering = t
                .tails
                .iter()
                .filter(|tail| {
                    idx.descends_from(DyadicIndex {
                        stage: tail.stage,
                        cell: tail.cell,
                    })
                })
                .max_by_key(|tail| tail.stage);
            // Only safe when no deeper entry or tail re-anchors inside this
            // subtree.
            match covering {
                Some(tail) => {
                    let no_refinement = t
                        .entries
                        .iter()
                        .all(|e| {
                            e.stage <= idx.stage
                                || !DyadicIndex { stage: e.stage, cell: e.cell }
                                    .descends_from(idx)
                        })
                        && t.tails.iter().all(|o| {
                            o.stage <= tail.stage
                                || !DyadicIndex { stage: o.stage, cell: o.cell }
                                    .descends_from(idx)
                        });
                    no_refinement && tail.schedule.is_stage_uniform()
                }
                None => false,
            }
        }
        _ => true,
    };
    if uniform_below {
        let mut product = prefix;
        for j in idx.stage..n {
            // Any descendant cell works: angles below idx are stage-only.
            let cell = idx.cell << (j - idx.stage);
            product /= schedule.theta(DyadicIndex { stage: j, cell })?.cos();
        }
        return Ok(product * 0.5f64.powi(idx.stage as i32));
    }
    let sec = 1.0 / schedule.theta(idx)?.cos();
    Ok(cell_measure(schedule, idx.left(), n, prefix * sec)?
        + cell_measure(schedule, idx.right(), n, prefix * sec)?)
}

/// Convergence of the stretch product over *all* descent paths through
/// `cell`. For tables this walks every declared tail intersecting the cell's
/// subtree (a single representative path would miss divergent branches).
fn convergence_below(schedule: &AngleSchedule, cell: DyadicIndex) -> Result<Convergence> {
    if let AngleSchedule::Table(t) = schedule {
        // Covered from above: delegate to the innermost covering tail.
        if let Some(tail) = t
            .tails
            .iter()
            .filter(|tail| {
                cell.descends_from(DyadicIndex {
                    stage: tail.stage,
                    cell: tail.cell,
                })
            })
            .max_by_key(|tail| tail.stage)
        {
            let rebased = DyadicIndex {
                stage: cell.stage - tail.stage,
                cell: cell.cell - (tail.cell << (cell.stage - tail.stage)),
            };
            return convergence_below(&tail.schedule, rebased);
        }
        // Otherwise aggregate the tails anchored inside the subtree. Any
        // divergent tail taints the whole cell; incomplete coverage (or an
        // undetermined tail) leaves it undetermined.
        let mut covered = 0.0;
        let mut any_divergent = false;
        let mut any_unknown = false;
        for tail in &t.tails {
            let anchor = DyadicIndex {
                stage: tail.stage,
                cell: tail.cell,
            };
            if !anchor.descends_from(cell) {
                continue;
            }
            // Only maximal anchors count toward coverage; nested ones refine
            // a region already claimed by their ancestor.
            let nested = t.tails.iter().any(|o| {
                (o.stage, o.cell) != (tail.stage, tail.cell)
                    && o.stage >= cell.stage
                    && anchor.descends_from(DyadicIndex {
                        stage: o.stage,
                        cell: o.cell,
                    })
            });
            if !nested {
                covered += 0.5f64.powi((tail.stage - cell.stage) as i32);
            }
            match convergence_below(&tail.schedule, DyadicIndex::ROOT)? {
                Convergence::Diverging => any_divergent = true,
                Convergence::Undetermined => any_unknown = true,
                Convergence::Converging => {}
            }
        }
        return Ok(if any_divergent {
            Convergence::Diverging
        } else if any_unknown || covered < 1.0 - tol::EXACT_F64 {
            Convergence::Undetermined
        } else {
            Convergence::Converging
        });
    }
    Ok(match descent_product_converges(schedule, cell)? {
        Some(true) => Convergence::Converging,
        Some(false) => Convergence::Diverging,
        None => Convergence::Undetermined,
    })
}

/// Dyadic quadrature of the image measure: for `B` a union of dyadic cells
/// (stages ≤ `n`), sums `base_length · 2⁻ⁿ · Π̃` over the stage-`n` cells of
/// `B`. This equals exactly the length of the stage-`n` polyline over `B`.
/// The convergence flag reports whether deepening `n` would converge.
pub fn measure_of_image(
    schedule: &AngleSchedule,
    base_length: f64,
    cells: &[DyadicIndex],
    n: u32,
) -> Result<MeasureResult> {
    if !(base_length > 0.0) || !base_length.is_finite() {
        return Err(Error::OutOfRange(format!(
            "base length must be positive, got {base_length}"
        )));
    }
    if n > 60 {
        return Err(Error::DepthGuard { depth: n, max: 60 });
    }
    if cells.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    schedule.validate()?;
    let mut value = 0.0;
    let mut convergence = Convergence::Converging;
    for &c in cells {
        if c.stage > n {
            return Err(Error::StageExceedsDepth {
                stage: c.stage,
                depth: n,
            });
        }
        // Prefix product along the ancestors of c (stages 0..c.stage).
        let mut prefix = 1.0;
        for j in 0..c.stage {
            prefix /= schedule
                .theta(DyadicIndex {
                    stage: j,
                    cell: c.cell >> (c.stage - j),
                })?
                .cos();
        }
        value += cell_measure(schedule, c, n, prefix)?;
        match convergence_below(schedule, c)? {
            Convergence::Converging => {}
            Convergence::Diverging => convergence = Convergence::Diverging,
            Convergence::Undetermined => {
                if convergence == Convergence::Converging {
                    convergence = Convergence::Undetermined;
                }
            }
        }
    }
    Ok(MeasureResult {
        value: value * base_length,
        convergence,
    })
}

/// One row of a density profile.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DensityEntry {
    pub radius: f64,
    /// Polyline length inside the ball divided by the diameter `2ρ` — the
    /// finite-scale 1-density of the sample at the center.
    pub ratio: f64,
}

/// Density ratios across a decreasing radius ladder.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityProfile {
    pub entries: Vec<DensityEntry>,
    /// Set when the ratios are nondecreasing as the radius shrinks —
    /// finite-scale evidence of unbounded density.
    pub monotone_growth: bool,
}

/// Exact length of the part of segment `(a, b)` inside the closed disk of
/// radius `r` around `c`.
fn segment_length_in_disk(a: Point2, b: Point2, c: Point2, r: f64) -> f64 {
    let d = b.sub(a);
    let e = a.sub(c);
    let qa = d.dot(d);
    if qa == 0.0 {
        return 0.0;
    }
    let qb = d.dot(e); // half the linear coefficient
    let qc = e.dot(e) - r * r;
    let disc = qb * qb - qa * qc;
    if disc <= 0.0 {
        return 0.0; // misses the disk (or touches in one point)
    }
    let sq = disc.sqrt();
    let t0 = ((-qb - sq) / qa).max(0.0);
    let t1 = ((-qb + sq) / qa).min(1.0);
    if t1 <= t0 {
        return 0.0;
    }
    (t1 - t0) * qa.sqrt()
}

/// Computes length-in-ball density ratios of a polyline at `center` across a
/// strictly decreasing radius ladder. The polyline's longest segment must be
/// [`tol::BOX_RESOLUTION_FACTOR`]× finer than the smallest radius.
pub fn density_profile(
    vertices: &[Point2],
    center: Point2,
    radii: &[f64],
) -> Result<DensityProfile> {
    if vertices.len() < 2 {
        return Err(Error::EmptyPointSet);
    }
    if radii.len() < 2 {
        return Err(Error::OutOfRange(
            "need at least two radii for a profile".into(),
        ));
    }
    for w in radii.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::OutOfRange(format!(
                "radius ladder must strictly decrease, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    let min_radius = *radii.last().expect("nonempty");
    if !(min_radius > 0.0) {
        return Err(Error::OutOfRange("radii must be positive".into()));
    }
    let resolution = vertices
        .windows(2)
        .map(|w| w[0].dist(w[1]))
        .fold(0.0f64, f64::max);
    if resolution * tol::BOX_RESOLUTION_FACTOR > min_radius {
        return Err(Error::ResolutionTooCoarse {
            resolution,
            scale: min_radius,
            factor: tol::BOX_RESOLUTION_FACTOR,
        });
    }
    let mut entries = Vec::with_capacity(radii.len());
    for &r in radii {
        let len: f64 = vertices
            .windows(2)
            .map(|w| segment_length_in_disk(w[0], w[1], center, r))
            .sum();
        entries.push(DensityEntry {
            radius: r,
            ratio: len / (2.0 * r),
        });
    }
    let monotone_growth = entries
        .windows(2)
        .all(|w| w[1].ratio >= w[0].ratio - tol::GEOM_ABS);
    Ok(DensityProfile {
        entries,
        monotone_growth,
    })
}

/// Rectifiability verdict for the limit set of a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Rectifiable,
    NotRectifiable,
    Undetermined,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Rectifiable => "rectifiable",
            Verdict::NotRectifiable => "not_rectifiable",
            Verdict::Undetermined => "undetermined",
        })
    }
}

/// Digest of a stretch-product classification.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LambdaSummary {
    pub depth: u32,
    pub bounded: usize,
    pub diverging: usize,
    pub undetermined: usize,
    pub max_partial_product: f64,
}

/// Rectifiability report: verdict, the decisive criterion in words, the
/// stretch-product evidence, and a dimension estimate when one is available.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RectifiabilityReport {
    pub verdict: Verdict,
    pub criterion: String,
    pub lambda_summary: LambdaSummary,
    pub dim_estimate: Option<DimensionEstimate>,
}

/// Classifies the limit set of the tree's schedule as rectifiable or not.
///
/// Decision order: a similarity dimension strictly above 1 settles the
/// matter; otherwise bounded stretch products everywhere give a Lipschitz
/// limit parametrization (rectifiable), divergent ones rule it out, and
/// tables without declared tails stay undetermined.
pub fn rectifiability_report(tree: &CapTree) -> Result<RectifiabilityReport> {
    let depth = tree.depth().min(8);
    // A bound this large never trips for convergent products; "diverging"
    // below therefore means genuinely divergent tails, not "exceeds m".
    let cls = classify_lambda(tree, depth, 1e300)?;
    let mut bounded = 0usize;
    let mut diverging = 0usize;
    let mut undetermined = 0usize;
    let mut max_partial: f64 = 1.0;
    for c in &cls.cells {
        max_partial = max_partial.max(c.partial_product);
        match c.verdict {
            CellVerdict::BoundedBy { .. } => bounded += 1,
            CellVerdict::Diverging => diverging += 1,
            CellVerdict::Undetermined => undetermined += 1,
        }
    }
    let lambda_summary = LambdaSummary {
        depth,
        bounded,
        diverging,
        undetermined,
        max_partial_product: max_partial,
    };
    let dim_estimate = dim_bounds_koch(tree).ok();
    if let Some(est) = &dim_estimate {
        if let Some((lo, _)) = est.bounds {
            if lo > 1.0 + tol::EXACT_F64 {
                return Ok(RectifiabilityReport {
                    verdict: Verdict::NotRectifiable,
                    criterion: "similarity dimension exceeds 1".into(),
                    lambda_summary,
                    dim_estimate,
                });
            }
        }
    }
    let total = cls.cells.len();
    let report = if diverging == total {
        RectifiabilityReport {
            verdict: Verdict::NotRectifiable,
            criterion: "stretch product diverges on every descent path".into(),
            lambda_summary,
            dim_estimate,
        }
    } else if diverging > 0 {
        RectifiabilityReport {
            verdict: Verdict::NotRectifiable,
            criterion: "stretch product diverges on a positive fraction of descent paths".into(),
            lambda_summary,
            dim_estimate,
        }
    } else if undetermined > 0 {
        RectifiabilityReport {
            verdict: Verdict::Undetermined,
            criterion: "table schedule undetermined beyond declared finite data".into(),
            lambda_summary,
            dim_estimate,
        }
    } else {
        RectifiabilityReport {
            verdict: Verdict::Rectifiable,
            criterion: "angle sum square-summable, so the limit map is Lipschitz on all of [0,1]"
                .into(),
            lambda_summary,
            dim_estimate,
        }
    };
    Ok(report)
}

/// A rigid motion `p ↦ R(p) + t` (rotation by `rotation` about the origin,
/// then translation).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RigidMotion {
    pub rotation: f64,
    pub translation: Point2,
}

impl RigidMotion {
    pub fn apply(&self, p: Point2) -> Point2 {
        p.rotate(self.rotation).add(self.translation)
    }
}

/// Outcome of a centering attempt.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CenterResult {
    pub fits: bool,
    /// Why centering failed (empty when it fits).
    pub reason: String,
    /// One rigid motion per depth-`m` cap placing the first tree's cap
    /// inside the second tree's corresponding cap (midpoint-centered).
    pub transforms: Vec<RigidMotion>,
}

/// Checks whether the first tree's construction can be centered inside the
/// second's: the base must be no longer, and the angle schedule pointwise no
/// larger stage by stage (checked through stage `max(m, 1000)`; both
/// schedules must be stage-uniform). On success emits, for each depth-`m`
/// cap, the rigid motion placing it midpoint-centered inside the matching
/// cap of the second tree, and verifies the triangle containments.
pub fn can_center(a1: &CapTree, a2: &CapTree, m: u32) -> Result<CenterResult> {
    if !a1.schedule().is_stage_uniform() || !a2.schedule().is_stage_uniform() {
        return Err(Error::MethodMismatch(
            "centering comparison needs stage-uniform schedules".into(),
        ));
    }
    if m >= a1.depth() || m >= a2.depth() {
        return Err(Error::StageExceedsDepth {
            stage: m,
            depth: a1.depth().min(a2.depth()),
        });
    }
    if a1.base().length() > a2.base().length() + tol::EXACT_F64 {
        return Ok(CenterResult {
            fits: false,
            reason: format!(
                "base length {} exceeds target base length {}",
                a1.base().length(),
                a2.base().length()
            ),
            transforms: vec![],
        });
    }
    for n in 0..=m.max(1000) {
        let i = DyadicIndex { stage: n, cell: 0 };
        let t1 = a1.schedule().theta(i)?;
        let t2 = a2.schedule().theta(i)?;
        if t1 > t2 + tol::EXACT_F64 {
            return Ok(CenterResult {
                fits: false,
                reason: format!("angle at stage {n} is {t1} > {t2}"),
                transforms: vec![],
            });
        }
    }
    let mut transforms = Vec::with_capacity(1 << m);
    for cell in 0..(1u64 << m) {
        let idx = DyadicIndex { stage: m, cell };
        let c1 = a1.cap(idx)?;
        let c2 = a2.cap(idx)?;
        let rot = c2.base.angle() - c1.base.angle();
        let mid1 = c1.base.midpoint();
        let mid2 = c2.base.midpoint();
        let motion = RigidMotion {
            rotation: rot,
            translation: mid2.sub(mid1.rotate(rot)),
        };
        let [a, b, c] = c2.vertices();
        for v in c1.vertices() {
            if !point_in_triangle(motion.apply(v), a, b, c, tol::GEOM_ABS) {
                return Ok(CenterResult {
                    fits: false,
                    reason: format!("containment fails at depth-{m} cap {cell}"),
                    transforms: vec![],
                });
            }
        }
        transforms.push(motion);
    }
    Ok(CenterResult {
        fits: true,
        reason: String::new(),
        transforms,
    })
}

/// Cumulative-turn diagnostics of a stage-uniform schedule.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpiralDiagnostics {
    /// Cumulative angle sums Σ_{k ≤ n} θ_k (first entries; capped at 10⁴).
    pub partial_sums: Vec<f64>,
    /// First stage whose cumulative sum reaches the target turn, or `None`
    /// ("never") when the angle sum converges below it.
    pub stage_reaching_target: Option<u32>,
    /// For the shrinking-angle family: the flatness threshold below which
    /// the root-cap geometry already refutes uniform flatness,
    /// `(31ε/32)/(65/128)`.
    pub delta1_bound: Option<f64>,
}

/// Sums the per-stage angles until the cumulative turn reaches
/// `target_turn`, recording partial sums. Convergent schedules that never
/// reach the target report "never" with the limiting sum recorded.
pub fn spiral_diagnostics(schedule: &AngleSchedule, target_turn: f64) -> Result<SpiralDiagnostics> {
    if !schedule.is_stage_uniform() {
        return Err(Error::MethodMismatch(
            "spiral diagnostics need a stage-uniform schedule".into(),
        ));
    }
    if !(target_turn > 0.0) || !target_turn.is_finite() {
        return Err(Error::OutOfRange(format!(
            "target turn must be positive, got {target_turn}"
        )));
    }
    let mut partial_sums = Vec::new();
    let mut sum = 0.0;
    let mut stage_reaching_target = None;
    for n in 0..100_000_000u32 {
        let th = schedule.theta(DyadicIndex { stage: n, cell: 0 })?;
        sum += th;
        if partial_sums.len() < 10_000 {
            partial_sums.push(sum);
        }
        if sum >= target_turn {
            stage_reaching_target = Some(n);
            break;
        }
        // Convergent tail that cannot reach the target anymore → never.
        if th < tol::PRODUCT_CONVERGENCE {
            break;
        }
    }
    let delta1_bound = match *schedule {
        AngleSchedule::AEps { eps } => Some((31.0 * eps / 32.0) / (65.0 / 128.0)),
        _ => None,
    };
    Ok(SpiralDiagnostics {
        partial_sums,
        stage_reaching_target,
        delta1_bound,
    })
}
