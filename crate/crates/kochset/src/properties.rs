//! Finite-scale checkers for the eight plane-approximation properties on
//! point samples, plus local length-finiteness scans and the admissible-scale
//! filter tying flatness tolerances to construction stages.
//!
//! All quantifiers over radii are rendered as explicit scale ladders with
//! resolution guards: the checkers verify at tested scales, they do not prove
//! limits. Existential "there is a ρ_y" clauses become a search over the
//! ladder (the verdict holds if some candidate works), and every report
//! records the mode used.

use serde::{Deserialize, Serialize};

use crate::construction::{CapTree, DyadicIndex};
use crate::error::{Error, Result};
use crate::geometry::{minmax_fit_free, minmax_fit_through, AffineLine, Point2};
use crate::tol;

/// The eight approximation properties, in their fixed order.
///
/// - `I`: per-center, per-scale approximating line through the center.
/// - `II`: per-scale free line for every sample point near the center,
///   within an existential uniformity radius.
/// - `III`: property I at every tolerance of a declared tolerance ladder.
/// - `IV`: property II at every tolerance of a declared tolerance ladder.
/// - `V`: property I with one global radius bound: the whole set sits in a
///   ball of the largest tested radius and every tested scale must pass.
/// - `VI`: one line per center, chosen once and reused across all scales.
/// - `VII`: property VI's single line must also serve every sample point
///   near the center, within an existential uniformity radius.
/// - `VIII`: property VI with the global radius bound of V.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyId {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
}

impl std::fmt::Display for PropertyId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PropertyId::I => "i",
            PropertyId::II => "ii",
            PropertyId::III => "iii",
            PropertyId::IV => "iv",
            PropertyId::V => "v",
            PropertyId::VI => "vi",
            PropertyId::VII => "vii",
            PropertyId::VIII => "viii",
        })
    }
}

/// One radius of a flatness profile. `beta` values are the min-max fit width
/// divided by the radius, so containment in a `δρ`-neighbourhood of the line
/// is exactly `beta ≤ δ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlatnessEntry {
    pub rho: f64,
    /// Fit width / ρ for the best line constrained to pass through the
    /// center.
    pub beta_through: f64,
    /// Fit width / ρ for the best unconstrained line; never exceeds
    /// `beta_through` (the free fit minimizes over a superset of lines).
    pub beta_free: f64,
    /// The best line in the requested mode (through-center or free).
    pub best_line: Option<AffineLine>,
    /// Set when the ball contains no sample points: a vacuous pass.
    pub empty: bool,
}

/// Flatness of a point sample around one center across a radius ladder.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlatnessProfile {
    pub center: Point2,
    pub entries: Vec<FlatnessEntry>,
}

/// Closed-ball membership; boundary points within 1e-12 of the radius are
/// included (so exact dyadic constructions don't drop edge samples to
/// rounding).
fn ball(points: &[Point2], center: Point2, rho: f64) -> Vec<Point2> {
    points
        .iter()
        .copied()
        .filter(|p| p.dist(center) <= rho + tol::EXACT_F64)
        .collect()
}

fn check_ladder(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::OutOfRange("empty scale ladder".into()));
    }
    for w in radii.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::OutOfRange(format!(
                "scale ladder must strictly decrease, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    if !(radii[radii.len() - 1] > 0.0) || !radii[0].is_finite() {
        return Err(Error::OutOfRange("scales must be positive finite".into()));
    }
    Ok(())
}

fn check_resolution(radii: &[f64], resolution: f64) -> Result<()> {
    let min = radii[radii.len() - 1];
    if !(resolution >= 0.0) {
        return Err(Error::NonFinite {
            context: "sample resolution",
        });
    }
    if resolution * tol::BOX_RESOLUTION_FACTOR > min {
        return Err(Error::ResolutionTooCoarse {
            resolution,
            scale: min,
            factor: tol::BOX_RESOLUTION_FACTOR,
        });
    }
    Ok(())
}

/// Computes flatness ratios of `points` around `center` for each radius of a
/// strictly decreasing ladder. Both the through-center and the free fit are
/// always computed; `constrain_through_center` selects which best line is
/// recorded per entry. `resolution` is the sample's declared resolution
/// (deepest segment length or max point spacing) and must be
/// [`tol::BOX_RESOLUTION_FACTOR`]× finer than the smallest radius.
pub fn flatness_profile(
    points: &[Point2],
    center: Point2,
    radii: &[f64],
    constrain_through_center: bool,
    resolution: f64,
) -> Result<FlatnessProfile> {
    check_ladder(radii)?;
    check_resolution(radii, resolution)?;
    let mut entries = Vec::with_capacity(radii.len());
    for &rho in radii {
        let in_ball = ball(points, center, rho);
        if in_ball.is_empty() {
            entries.push(FlatnessEntry {
                rho,
                beta_through: 0.0,
                beta_free: 0.0,
                best_line: None,
                empty: true,
            });
            continue;
        }
        let (line_t, w_t) = minmax_fit_through(&in_ball, center)?;
        let (line_f, w_f) = minmax_fit_free(&in_ball)?;
        entries.push(FlatnessEntry {
            rho,
            beta_through: w_t / rho,
            beta_free: w_f / rho,
            best_line: Some(if constrain_through_center { line_t } else { line_f }),
            empty: false,
        });
    }
    Ok(FlatnessProfile { center, entries })
}

/// Verdict for one center.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CenterVerdict {
    /// The check passed for every tested scale up to `rho_y` (the largest
    /// working uniformity-radius candidate; equal to the ladder maximum when
    /// every scale passed).
    Holds { rho_y: f64 },
    /// Witnessed failure: at radius `rho`, the ball around `x` (the center
    /// itself except for the neighbor-uniform properties) has flatness
    /// `beta` > tolerance against `line`.
    FailsAt {
        rho: f64,
        beta: f64,
        x: Point2,
        line: Option<AffineLine>,
    },
}

/// Per-center result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CenterReport {
    pub center: Point2,
    pub verdict: CenterVerdict,
}

/// The single reused line of the strong properties (VI–VIII).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LineReuse {
    pub center: Point2,
    pub line: AffineLine,
    /// Scale at which the line was chosen (the smallest tested radius).
    pub chosen_at_rho: f64,
}

/// Full report of one property check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: PropertyId,
    pub delta: f64,
    pub sampled_centers: usize,
    pub scales: Vec<f64>,
    /// Human-readable record of the line mode used (through-center vs free,
    /// per-scale vs reused), mirroring the ambiguity notes of the checks.
    pub line_mode: String,
    pub per_center: Vec<CenterReport>,
    /// For V/VIII: whether the whole sample sits in a ball of the largest
    /// tested radius (a precondition of those properties).
    pub contained_in_rho0: Option<bool>,
    /// The reused lines of VI/VII/VIII.
    pub line_reuse: Vec<LineReuse>,
    pub holds: bool,
}

/// Max distance from the points to a fixed line, divided by ρ.
fn beta_against_line(points: &[Point2], line: &AffineLine, rho: f64) -> f64 {
    points
        .iter()
        .map(|p| crate::geometry::distance_to_line(*p, line))
        .fold(0.0, f64::max)
        / rho
}

/// Largest number of neighbor points examined per center for the
/// neighbor-uniform properties (II, IV, VII): the ball around the center is
/// subsampled evenly by index to keep the check O(centers · scales).
const MAX_NEIGHBOR_CANDIDATES: usize = 32;

/// Evenly indexed subsample of the points within `rho_y` of `center`,
/// always including the center itself.
fn neighbor_candidates(points: &[Point2], center: Point2, rho_y: f64) -> Vec<Point2> {
    let in_ball = ball(points, center, rho_y);
    let mut out = vec![center];
    if in_ball.is_empty() {
        return out;
    }
    let step = (in_ball.len() / MAX_NEIGHBOR_CANDIDATES).max(1);
    out.extend(in_ball.iter().copied().step_by(step));
    out
}

/// One flatness test: points of `B_rho(x)` against either a fixed line or
/// the best fit (through `x` or free). Returns the measured beta and the
/// line used.
fn beta_at(
    points: &[Point2],
    x: Point2,
    rho: f64,
    through: bool,
    fixed_line: Option<&AffineLine>,
) -> Result<(f64, Option<AffineLine>)> {
    let in_ball = ball(points, x, rho);
    if in_ball.is_empty() {
        return Ok((0.0, None)); // vacuous
    }
    match fixed_line {
        Some(line) => Ok((beta_against_line(&in_ball, line, rho), Some(*line))),
        None => {
            let (line, w) = if through {
                minmax_fit_through(&in_ball, x)?
            } else {
                minmax_fit_free(&in_ball)?
            };
            Ok((w / rho, Some(line)))
        }
    }
}

/// Checks whether some ball of radius `rho0` contains all points, using the
/// bounding-box center (adequate for the gallery's clipped samples; a failed
/// check is reported, not erred).
fn contained_in_ball(points: &[Point2], rho0: f64) -> bool {
    if points.is_empty() {
        return true;
    }
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for p in points {
        xmin = xmin.min(p.x);
        xmax = xmax.max(p.x);
        ymin = ymin.min(p.y);
        ymax = ymax.max(p.y);
    }
    let c = Point2::raw(0.5 * (xmin + xmax), 0.5 * (ymin + ymax));
    points.iter().all(|p| p.dist(c) <= rho0 + tol::EXACT_F64)
}

/// The base check behind every property: for one center and one uniformity
/// radius candidate `rho_y`, test all ladder scales ≤ `rho_y`.
///
/// `through`: constrain per-scale fits through the test point.
/// `neighbors`: also test sample points within `rho_y` of the center
///   (their fits are free unless a reused line is given).
/// `reused`: a fixed line replayed across scales instead of per-scale fits.
#[allow(clippy::too_many_arguments)]
fn center_passes(
    points: &[Point2],
    center: Point2,
    scales: &[f64],
    rho_y: f64,
    delta: f64,
    through: bool,
    neighbors: bool,
    reused: Option<&AffineLine>,
) -> Result<std::result::Result<(), (f64, f64, Point2, Option<AffineLine>)>> {
    let xs = if neighbors {
        neighbor_candidates(points, center, rho_y)
    } else {
        vec![center]
    };
    for &rho in scales.iter().filter(|r| **r <= rho_y + tol::EXACT_F64) {
        for &x in &xs {
            let (beta, line) = beta_at(points, x, rho, through, reused)?;
            if beta > delta {
                return Ok(Err((rho, beta, x, line)));
            }
        }
    }
    Ok(Ok(()))
}

/// Runs one property check over `centers` and a strictly decreasing scale
/// ladder.
///
/// Modes per property: I checks a through-center line per scale; II a free
/// line per scale for neighbor points, with the uniformity radius searched
/// over the ladder; III/IV repeat I/II at tolerances `{δ, δ/2, δ/4}`; V is I
/// with every scale mandatory plus the global ball precondition; VI fits one
/// through-center line at the smallest scale and replays it; VII replays
/// VI's line on neighbor balls under a searched uniformity radius; VIII is
/// VI with V's preconditions. Failures carry a witness (x, ρ, β, line) that
/// re-checks independently.
pub fn check_property(
    points: &[Point2],
    property: PropertyId,
    delta: f64,
    centers: &[Point2],
    scales: &[f64],
    resolution: f64,
) -> Result<PropertyReport> {
    if points.is_empty() || centers.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::OutOfRange(format!(
            "tolerance must be positive, got {delta}"
        )));
    }
    check_ladder(scales)?;
    check_resolution(scales, resolution)?;

    // III/IV: conjunction of the base property over a fixed tolerance
    // sub-ladder (finite surrogate of "for every tolerance").
    if matches!(property, PropertyId::III | PropertyId::IV) {
        let base = if property == PropertyId::III {
            PropertyId::I
        } else {
            PropertyId::II
        };
        let mut merged: Option<PropertyReport> = None;
        for d in [delta, delta / 2.0, delta / 4.0] {
            let r = check_property(points, base, d, centers, scales, resolution)?;
            merged = Some(match merged {
                None => r,
                Some(mut m) => {
                    m.holds = m.holds && r.holds;
                    // Keep the first failing center set (smallest tolerance
                    // failures replace passing verdicts).
                    for (mc, rc) in m.per_center.iter_mut().zip(r.per_center) {
                        if matches!(mc.verdict, CenterVerdict::Holds { .. })
                            && matches!(rc.verdict, CenterVerdict::FailsAt { .. })
                        {
                            *mc = rc;
                        }
                    }
                    m
                }
            });
        }
        let mut rep = merged.expect("three tolerances merged");
        rep.property = property;
        rep.delta = delta;
        rep.line_mode = format!(
            "{}; repeated at tolerances delta, delta/2, delta/4",
            rep.line_mode
        );
        return Ok(rep);
    }

    let through = matches!(
        property,
        PropertyId::I | PropertyId::V | PropertyId::VI | PropertyId::VIII
    );
    let neighbors = matches!(property, PropertyId::II | PropertyId::VII);
    let strong = matches!(
        property,
        PropertyId::VI | PropertyId::VII | PropertyId::VIII
    );
    let uniform_rho0 = matches!(property, PropertyId::V | PropertyId::VIII);
    let line_mode = match property {
        PropertyId::I => "through-center line per scale",
        PropertyId::II => "free line per scale, neighbor-uniform",
        PropertyId::V => "through-center line per scale; global rho0 ball",
        PropertyId::VI => "one through-center line chosen at the smallest scale, reused",
        PropertyId::VII => {
            "one through-center line chosen at the smallest scale, reused on neighbor balls"
        }
        PropertyId::VIII => {
            "one through-center line chosen at the smallest scale, reused; global rho0 ball"
        }
        _ => unreachable!("III/IV handled above"),
    }
    .to_string();

    let contained_in_rho0 = if uniform_rho0 {
        Some(contained_in_ball(points, scales[0]))
    } else {
        None
    };

    let smallest = scales[scales.len() - 1];
    let mut per_center = Vec::with_capacity(centers.len());
    let mut line_reuse = Vec::new();
    let mut holds = contained_in_rho0 != Some(false);
    for &y in centers {
        // Strong variants: fix the line once, at the smallest tested scale.
        let reused_line = if strong {
            let in_ball = ball(points, y, smallest);
            let line = if in_ball.is_empty() {
                AffineLine::new(y, 0.0)?
            } else {
                minmax_fit_through(&in_ball, y)?.0
            };
            line_reuse.push(LineReuse {
                center: y,
                line,
                chosen_at_rho: smallest,
            });
            Some(line)
        } else {
            None
        };
        // The uniformity radius is existential for I/II/VI/VII (largest
        // working ladder candidate); V/VIII must pass at every scale.
        let candidates: Vec<f64> = if uniform_rho0 {
            vec![scales[0]]
        } else {
            scales.to_vec()
        };
        let mut verdict = None;
        for &rho_y in &candidates {
            match center_passes(
                points,
                y,
                scales,
                rho_y,
                delta,
                through,
                neighbors,
                reused_line.as_ref(),
            )? {
                Ok(()) => {
                    verdict = Some(CenterVerdict::Holds { rho_y });
                    break;
                }
                Err((rho, beta, x, line)) => {
                    // Keep the first (largest-candidate) witness in case no
                    // smaller candidate works either.
                    if verdict.is_none() {
                        verdict = Some(CenterVerdict::FailsAt { rho, beta, x, line });
                    }
                    if uniform_rho0 {
                        verdict = Some(CenterVerdict::FailsAt { rho, beta, x, line });
                        break;
                    }
                }
            }
        }
        let verdict = verdict.expect("at least one candidate evaluated");
        if matches!(verdict, CenterVerdict::FailsAt { .. }) {
            holds = false;
        }
        per_center.push(CenterReport { center: y, verdict });
    }
    Ok(PropertyReport {
        property,
        delta,
        sampled_centers: centers.len(),
        scales: scales.to_vec(),
        line_mode,
        per_center,
        contained_in_rho0,
        line_reuse,
        holds,
    })
}

/// One row of a local length-finiteness scan.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FinitenessEntry {
    pub rho: f64,
    /// Sum of the length weights of sample points inside the ball.
    pub length: f64,
    /// `length / (2ρ)` — 1 on a straight line through the center.
    pub ratio: f64,
}

/// Per-center length-growth table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FinitenessScan {
    pub center: Point2,
    pub entries: Vec<FinitenessEntry>,
    /// Set when the length fails to decrease proportionally to ρ (the ratio
    /// strictly grows as the radius shrinks) — finite-scale divergence
    /// evidence.
    pub growth: bool,
}

/// Sums per-point length weights inside shrinking balls around each center.
/// Each sample point carries the polyline length it represents, so the sums
/// approximate the length measure of the ball.
pub fn local_finiteness_scan(
    weighted: &[(Point2, f64)],
    centers: &[Point2],
    radii: &[f64],
) -> Result<Vec<FinitenessScan>> {
    if weighted.is_empty() || centers.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    check_ladder(radii)?;
    for (_, w) in weighted {
        if !w.is_finite() || *w < 0.0 {
            return Err(Error::OutOfRange(format!(
                "length weight must be a nonnegative finite number, got {w}"
            )));
        }
    }
    let mut out = Vec::with_capacity(centers.len());
    for &c in centers {
        let mut entries = Vec::with_capacity(radii.len());
        for &rho in radii {
            let length: f64 = weighted
                .iter()
                .filter(|(p, _)| p.dist(c) <= rho + tol::EXACT_F64)
                .map(|(_, w)| w)
                .sum();
            entries.push(FinitenessEntry {
                rho,
                length,
                ratio: length / (2.0 * rho),
            });
        }
        let growth = entries
            .windows(2)
            .all(|w| w[1].ratio >= w[0].ratio - tol::GEOM_ABS)
            && entries[entries.len() - 1].ratio > entries[0].ratio + tol::GEOM_ABS;
        out.push(FinitenessScan {
            center: c,
            entries,
            growth,
        });
    }
    Ok(out)
}

/// Result of a tolerance-ladder exploration of a base property.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeltaLadderReport {
    pub reports: Vec<PropertyReport>,
    /// Smallest tested tolerance at which the base property still holds at
    /// every tested scale — the finite-sample surrogate of "holds for every
    /// tolerance".
    pub smallest_delta_holding: Option<f64>,
}

/// Replays a base property (I or II) across a strictly decreasing tolerance
/// ladder.
pub fn delta_ladder_check(
    points: &[Point2],
    base: PropertyId,
    deltas: &[f64],
    centers: &[Point2],
    scales: &[f64],
    resolution: f64,
) -> Result<DeltaLadderReport> {
    if !matches!(base, PropertyId::I | PropertyId::II) {
        return Err(Error::MethodMismatch(format!(
            "tolerance-ladder exploration is defined for base properties i/ii, got {base}"
        )));
    }
    check_ladder(deltas)?;
    let mut reports = Vec::with_capacity(deltas.len());
    let mut smallest_delta_holding = None;
    for &d in deltas {
        let r = check_property(points, base, d, centers, scales, resolution)?;
        if r.holds {
            smallest_delta_holding = Some(d);
        }
        reports.push(r);
    }
    Ok(DeltaLadderReport {
        reports,
        smallest_delta_holding,
    })
}

/// Filters a scale ladder down to the radii at which a tolerance `delta` is
/// provably adequate for the tree's construction: a scale `r` is admissible
/// when the stage `n₁` whose segment length lies in `[r/2, r)` satisfies
/// `atan(delta) > 2·θ_{n₁} + θ_{n₁−1} + θ_{n₁−2}`. A line along the local
/// stage-`n₁` chord then absorbs both the sub-scale wiggle (the cap heights
/// below stage `n₁` form a geometric series bounded by `2·θ_{n₁}`) and the
/// chord tilts of the two coarser stages that can still cross the ball. For
/// a constant angle this is the sharp `4θ` flatness cone of the self-similar
/// curve. Requires a stage-uniform schedule (the rule compares angles by
/// stage alone).
pub fn admissible_scales(tree: &CapTree, delta: f64, scales: &[f64]) -> Result<Vec<f64>> {
    if !tree.schedule().is_stage_uniform() {
        return Err(Error::MethodMismatch(
            "the admissible-scale rule needs a stage-uniform schedule".into(),
        ));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::OutOfRange(format!(
            "tolerance must be positive, got {delta}"
        )));
    }
    check_ladder(scales)?;
    let theta_delta = delta.atan();
    let theta = |n: u32| -> Result<f64> {
        tree.schedule().theta(DyadicIndex { stage: n, cell: 0 })
    };
    let mut out = Vec::new();
    'scale: for &r in scales {
        // Find the stage whose segment length falls in [r/2, r). Segment
        // lengths decrease to 0, so scan from the top; scales outside the
        // tree's resolved range are dropped.
        for n in 0..=tree.depth() {
            let len = tree.stage_segment_length(n)?;
            if len >= r * 0.5 && len < r {
                // Clamp the two-stage lookback at the root for coarse
                // scales; monotone schedules make that conservative.
                let bound = 2.0 * theta(n)?
                    + theta(n.saturating_sub(1))?
                    + theta(n.saturating_sub(2))?;
                if theta_delta > bound {
                    out.push(r);
                }
                continue 'scale;
            }
        }
    }
    Ok(out)
}
