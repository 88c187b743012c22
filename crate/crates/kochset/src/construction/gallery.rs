//! A small gallery of reference sets used as positive and negative test
//! cases for the plane-approximation properties: three countable line
//! families (horizontal lines accumulating on the x-axis, rotating lines
//! through the origin, and parabolas flattening onto the x-axis) and the
//! three Koch-type sets (constant-angle, shrinking-angle, and shrinking-angle
//! with edge-point neighbourhoods removed).

use serde::{Deserialize, Serialize};

use crate::construction::schedule::AngleSchedule;
use crate::construction::tree::{build_tree, edge_ball_spec, sample_limit_set};
use crate::error::{Error, Result};
use crate::geometry::{Point2, Segment};
use crate::tol;

/// Axis-aligned bounding box used to clip the countable line families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl BoundingBox {
    /// Validates finiteness and nonempty extent in both axes.
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self> {
        for (v, name) in [(xmin, "xmin"), (xmax, "xmax"), (ymin, "ymin"), (ymax, "ymax")] {
            if !v.is_finite() {
                return Err(Error::OutOfRange(format!("bounding box {name} not finite")));
            }
        }
        if xmin >= xmax || ymin >= ymax {
            return Err(Error::OutOfRange(format!(
                "empty bounding box [{xmin}, {xmax}] x [{ymin}, {ymax}]"
            )));
        }
        Ok(BoundingBox {
            xmin,
            xmax,
            ymin,
            ymax,
        })
    }

    /// Closed containment test.
    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }
}

/// The gallery members.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "set", rename_all = "snake_case")]
pub enum GallerySet {
    /// Horizontal lines `y = 1/n`, accumulating on (but not containing) the
    /// x-axis. Locally flat at every point, yet of locally infinite length
    /// near the origin.
    N,
    /// Lines through the origin with slopes `±delta/n`: every neighbourhood
    /// of the origin meets infinitely many directions inside a `delta`-cone.
    LambdaDelta { delta: f64 },
    /// Parabolas `y = ±x²/n`: like the previous family but with vanishing
    /// opening angle at every scale around the origin.
    LambdaSq,
    /// The constant-angle Koch-type curve with base angle `atan(2 eps)`.
    GammaEps { eps: f64 },
    /// The shrinking-angle Koch-type set.
    AEps { eps: f64 },
    /// The shrinking-angle set minus the exclusion balls around edge points.
    ScriptAEps { eps: f64 },
}

fn unit_base() -> Segment {
    Segment::new(Point2::raw(0.0, 0.0), Point2::raw(1.0, 0.0)).expect("unit base")
}

/// Samples `count` x-positions across `[bbox.xmin, bbox.xmax]` on the graph
/// `y = f(x)`, keeping points inside the box.
fn sample_graph(bbox: &BoundingBox, per_line: usize, f: impl Fn(f64) -> f64) -> Vec<Point2> {
    let mut out = Vec::new();
    for j in 0..per_line {
        let x = bbox.xmin + (j as f64 + 0.5) * (bbox.xmax - bbox.xmin) / per_line as f64;
        let p = Point2::raw(x, f(x));
        if bbox.contains(p) {
            out.push(p);
        }
    }
    out
}

/// Enumerates `1..=n` stopping as soon as `gap(n)` (the in-box distance
/// between member `n` and member `n+1`) drops below the omission threshold.
fn truncation_index(gap: impl Fn(u64) -> f64) -> u64 {
    let mut n = 1u64;
    // The families here all have strictly decreasing gaps, so the first
    // index whose gap is below threshold bounds the enumeration.
    while gap(n) >= tol::GALLERY_OMIT && n < 100_000_000 {
        n += 1;
    }
    n
}

/// Produces a deterministic point sample of a gallery set.
///
/// Line families require a bounding box (they are unbounded) and enumerate
/// members until consecutive lines are within [`tol::GALLERY_OMIT`] of each
/// other inside the box. Koch-type members ignore the box except as a final
/// filter and are sampled from a tree of depth `max(8, ceil(log2 count) + 2)`
/// capped at 16.
pub fn gallery(
    set: &GallerySet,
    bbox: Option<&BoundingBox>,
    count: usize,
) -> Result<Vec<Point2>> {
    if count == 0 {
        return Err(Error::OutOfRange("gallery sample count must be >= 1".into()));
    }
    let need_box = || -> Result<&BoundingBox> {
        bbox.ok_or_else(|| {
            Error::OutOfRange("a bounding box is required for unbounded line families".into())
        })
    };
    let pts = match *set {
        GallerySet::N => {
            let bb = need_box()?;
            // Lines y = 1/n that intersect the box vertically.
            let nmax = truncation_index(|n| 1.0 / (n as f64 * (n as f64 + 1.0)));
            let lines: Vec<f64> = (1..=nmax)
                .map(|n| 1.0 / n as f64)
                .filter(|y| *y >= bb.ymin && *y <= bb.ymax)
                .collect();
            if lines.is_empty() {
                return Err(Error::OutOfRange(
                    "bounding box misses every line of the family".into(),
                ));
            }
            let per_line = (count / lines.len()).max(1);
            let mut out = Vec::new();
            for y in lines {
                out.extend(sample_graph(bb, per_line, |_| y));
            }
            out
        }
        GallerySet::LambdaDelta { delta } => {
            if !delta.is_finite() || delta <= 0.0 {
                return Err(Error::OutOfRange(format!(
                    "lambda-delta slope parameter must be positive, got {delta}"
                )));
            }
            let bb = need_box()?;
            let xabs = bb.xmin.abs().max(bb.xmax.abs());
            let nmax =
                truncation_index(|n| xabs * delta / (n as f64 * (n as f64 + 1.0)));
            let per_line = (count / (2 * nmax as usize)).max(1);
            let mut out = Vec::new();
            for n in 1..=nmax {
                for sign in [1.0, -1.0] {
                    let s = sign * delta / n as f64;
                    out.extend(sample_graph(bb, per_line, |x| s * x));
                }
            }
            out
        }
        GallerySet::LambdaSq => {
            let bb = need_box()?;
            let xabs = bb.xmin.abs().max(bb.xmax.abs());
            let nmax =
                truncation_index(|n| xabs * xabs / (n as f64 * (n as f64 + 1.0)));
            let per_line = (count / (2 * nmax as usize)).max(1);
            let mut out = Vec::new();
            for n in 1..=nmax {
                for sign in [1.0, -1.0] {
                    out.extend(sample_graph(bb, per_line, |x| sign * x * x / n as f64));
                }
            }
            out
        }
        GallerySet::GammaEps { eps } => {
            let schedule = AngleSchedule::constant((2.0 * eps).atan())?;
            koch_sample(&schedule, count, false)?
        }
        GallerySet::AEps { eps } => {
            let schedule = AngleSchedule::a_eps(eps)?;
            koch_sample(&schedule, count, false)?
        }
        GallerySet::ScriptAEps { eps } => {
            let schedule = AngleSchedule::a_eps(eps)?;
            koch_sample(&schedule, count, true)?
        }
    };
    // Final box filter (curve families live in [0,1] x [-eps-ish, 2eps]).
    Ok(match bbox {
        Some(bb) => pts.into_iter().filter(|p| bb.contains(*p)).collect(),
        None => pts,
    })
}

fn koch_sample(schedule: &AngleSchedule, count: usize, exclude: bool) -> Result<Vec<Point2>> {
    let depth = ((count as f64).log2().ceil() as u32 + 2).clamp(8, 16);
    let tree = build_tree(schedule, &unit_base(), depth)?;
    let m = count.min(1 << depth);
    if exclude {
        let spec = edge_ball_spec(&tree)?;
        sample_limit_set(&tree, m, Some(&spec))
    } else {
        sample_limit_set(&tree, m, None)
    }
}
