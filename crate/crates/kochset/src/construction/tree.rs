//! The recursive cap tree and its derived point sets.

use serde::{Deserialize, Serialize};

use crate::construction::schedule::{AngleSchedule, DyadicIndex};
use crate::error::{Error, Result};
use crate::geometry::{Point2, Segment};

/// Hard cap on tree depth: 2^30 segments at the deepest stage.
pub const DEPTH_GUARD: u32 = 30;

/// One triangular cap: the isosceles triangle erected on `base` with apex
/// half-angle `theta` at each base endpoint.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Cap {
    /// Dyadic address of the cap.
    pub index: DyadicIndex,
    /// The segment the cap is erected on.
    pub base: Segment,
    /// Apex vertex (the new edge point this cap creates).
    pub apex: Point2,
    /// Base angle in radians.
    pub theta: f64,
    /// +1 if the apex lies to the left of the directed base, -1 to the right.
    pub orientation: i8,
}

impl Cap {
    /// The two replacement segments: `(base.a, apex)` and `(apex, base.b)`.
    pub fn sides(&self) -> (Segment, Segment) {
        (
            Segment::new(self.base.a, self.apex).expect("cap side degenerate"),
            Segment::new(self.apex, self.base.b).expect("cap side degenerate"),
        )
    }

    /// Triangle vertices in base-a, base-b, apex order.
    pub fn vertices(&self) -> [Point2; 3] {
        [self.base.a, self.base.b, self.apex]
    }
}

/// A stage polyline: the `2^stage + 1` vertices of one construction stage,
/// in order along the curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Polyline {
    pub stage: u32,
    pub vertices: Vec<Point2>,
}

impl Polyline {
    /// Sum of segment lengths.
    pub fn total_length(&self) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| w[0].dist(w[1]))
            .sum()
    }

    /// Segment `i` of the polyline.
    pub fn segment(&self, i: usize) -> Result<Segment> {
        if i + 1 >= self.vertices.len() {
            return Err(Error::OutOfRange(format!(
                "segment {i} out of range for polyline with {} vertices",
                self.vertices.len()
            )));
        }
        Segment::new(self.vertices[i], self.vertices[i + 1])
    }
}

/// Erects the cap for angle `theta` on `base`, placing the apex on the same
/// side of the base as `interior_ref` (a point inside the parent triangle):
/// each new cap nests *inside* the triangle whose edge it is built on, so for
/// nonincreasing schedules every cap is a subset of its parent cap.
///
/// If `interior_ref` is `None` (the root cap), ties are broken by preferring
/// the apex with larger x, then larger y.
pub fn cap_on_segment(
    index: DyadicIndex,
    base: Segment,
    theta: f64,
    interior_ref: Option<Point2>,
) -> Result<Cap> {
    if !theta.is_finite() || theta <= 0.0 {
        return Err(Error::AngleOutOfRange { theta });
    }
    let mid = base.midpoint();
    let d = base.direction();
    // Left normal of the directed base; apex = mid ± h·n̂ with h = (|base|/2)·tanθ.
    let n_left = Point2::raw(-d.y, d.x);
    let h = 0.5 * base.length() * theta.tan();
    let apex_left = mid.add(n_left.scale(h));
    let apex_right = mid.sub(n_left.scale(h));
    let (apex, orientation) = match interior_ref {
        Some(r) => {
            // Pick the apex on the same side as the reference point, so the
            // cap nests inside the parent triangle.
            if r.sub(mid).dot(n_left) > 0.0 {
                (apex_left, 1)
            } else {
                (apex_right, -1)
            }
        }
        None => {
            if (apex_left.x - apex_right.x).abs() > crate::tol::EXACT_F64 {
                if apex_left.x > apex_right.x {
                    (apex_left, 1)
                } else {
                    (apex_right, -1)
                }
            } else if apex_left.y >= apex_right.y {
                (apex_left, 1)
            } else {
                (apex_right, -1)
            }
        }
    };
    Ok(Cap {
        index,
        base,
        apex,
        theta,
        orientation,
    })
}

/// The full construction up to a depth: per-stage vertex arrays.
///
/// Stage `n` holds `2^n + 1` vertices; caps are reconstructed on demand from
/// consecutive stages rather than stored. Memory is ~`2^(depth+1)` points.
#[derive(Debug, Clone)]
pub struct CapTree {
    schedule: AngleSchedule,
    base: Segment,
    depth: u32,
    /// `stages[n]` = vertices of stage `n`, `n = 0..=depth`.
    stages: Vec<Vec<Point2>>,
}

/// Builds the cap tree for `schedule` over `base` down to `depth` stages.
///
/// Validates the schedule eagerly over every index it will touch (tables can
/// be sparse) and enforces the depth guard.
pub fn build_tree(schedule: &AngleSchedule, base: &Segment, depth: u32) -> Result<CapTree> {
    if depth > DEPTH_GUARD {
        return Err(Error::DepthGuard {
            depth,
            max: DEPTH_GUARD,
        });
    }
    schedule.validate()?;
    let mut stages: Vec<Vec<Point2>> = Vec::with_capacity(depth as usize + 1);
    stages.push(vec![base.a, base.b]);
    for n in 0..depth {
        let cur = &stages[n as usize];
        let ncells = cur.len() - 1;
        let mut next = Vec::with_capacity(2 * ncells + 1);
        for i in 0..ncells {
            let idx = DyadicIndex {
                stage: n,
                cell: i as u64,
            };
            let theta = schedule.theta(idx)?;
            // Monotonicity along this descent path (tables may interleave
            // entries and tails, so check at build time too).
            if n > 0 {
                let parent_theta = schedule.theta(idx.parent().expect("n > 0"))?;
                if theta > parent_theta + crate::tol::EXACT_F64 {
                    return Err(Error::ScheduleNotMonotone {
                        stage: n,
                        cell: i as u64,
                        child: theta,
                        parent: parent_theta,
                    });
                }
            }
            let seg = Segment::new(cur[i], cur[i + 1])?;
            // Interior reference: the third vertex of the parent cap. The
            // left child's base is (parent.a, apex) so the reference is
            // parent.b; the right child's is (apex, parent.b) so it is
            // parent.a. The root has no parent and uses the tie-break.
            let interior_ref = if n == 0 {
                None
            } else if i % 2 == 0 {
                Some(stages[n as usize - 1][i / 2 + 1])
            } else {
                Some(stages[n as usize - 1][i / 2])
            };
            let cap = cap_on_segment(idx, seg, theta, interior_ref)?;
            next.push(cur[i]);
            next.push(cap.apex);
        }
        next.push(cur[ncells]);
        stages.push(next);
    }
    Ok(CapTree {
        schedule: schedule.clone(),
        base: Segment::new(base.a, base.b)?,
        depth,
        stages,
    })
}

impl CapTree {
    /// The schedule the tree was built from.
    pub fn schedule(&self) -> &AngleSchedule {
        &self.schedule
    }

    /// The root base segment.
    pub fn base(&self) -> &Segment {
        &self.base
    }

    /// Number of construction stages below the root.
    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Borrowed vertex array of one stage.
    pub fn stage_vertices(&self, stage: u32) -> Result<&[Point2]> {
        self.stages
            .get(stage as usize)
            .map(|v| v.as_slice())
            .ok_or(Error::StageExceedsDepth {
                stage,
                depth: self.depth,
            })
    }

    /// Owned stage polyline.
    pub fn polyline(&self, stage: u32) -> Result<Polyline> {
        Ok(Polyline {
            stage,
            vertices: self.stage_vertices(stage)?.to_vec(),
        })
    }

    /// Reconstructs the cap at `idx` (requires `idx.stage < depth`).
    pub fn cap(&self, idx: DyadicIndex) -> Result<Cap> {
        if idx.stage >= self.depth {
            return Err(Error::StageExceedsDepth {
                stage: idx.stage,
                depth: self.depth,
            });
        }
        let n = idx.stage as usize;
        let i = idx.cell as usize;
        if i + 1 >= self.stages[n].len() {
            return Err(Error::OutOfRange(format!(
                "cell {} out of range at stage {}",
                idx.cell, idx.stage
            )));
        }
        let base = Segment::new(self.stages[n][i], self.stages[n][i + 1])?;
        let apex = self.stages[n + 1][2 * i + 1];
        let d = base.direction();
        let left = apex.sub(base.midpoint()).cross_sign(d);
        Ok(Cap {
            index: idx,
            base,
            apex,
            theta: self.schedule.theta(idx)?,
            orientation: left,
        })
    }

    /// Length of the (uniform-length) segments at a stage, taken from the
    /// first segment. For stage-uniform schedules all stage segments have
    /// equal length.
    pub fn stage_segment_length(&self, stage: u32) -> Result<f64> {
        let v = self.stage_vertices(stage)?;
        Ok(v[0].dist(v[1]))
    }
}

// Orientation helper kept private to this module: sign of the cross product
// of the base direction with the apex offset.
trait CrossSign {
    fn cross_sign(self, dir: Point2) -> i8;
}
impl CrossSign for Point2 {
    fn cross_sign(self, dir: Point2) -> i8 {
        if dir.cross(self) >= 0.0 {
            1
        } else {
            -1
        }
    }
}

/// Every vertex the construction ever creates, in creation order: the two
/// base endpoints, then stage by stage each stage's new apexes left to right.
/// After `depth` stages there are `2^depth + 1` of them.
pub fn edge_points(tree: &CapTree) -> Vec<Point2> {
    let mut pts = vec![tree.base.a, tree.base.b];
    for n in 1..=tree.depth {
        let v = &tree.stages[n as usize];
        for i in (1..v.len()).step_by(2) {
            pts.push(v[i]);
        }
    }
    pts
}

/// Exclusion balls around edge points (one per edge point, in the same
/// creation order as [`edge_points`]).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeBallSpec {
    pub centers: Vec<Point2>,
    /// Nominal radii: `rho_1 = 2^-9 * sqrt(1 + 112 eps^2)`, `rho_k = 4^(1-k) rho_1`.
    pub rho: Vec<f64>,
    /// Effective radii: `r_k = min(rho_k, half the distance from the point to
    /// the two previous stage polylines)`.
    pub radii: Vec<f64>,
}

impl EdgeBallSpec {
    /// Whether `p` lies in any exclusion ball.
    pub fn contains(&self, p: Point2) -> bool {
        self.centers
            .iter()
            .zip(&self.radii)
            .any(|(c, r)| c.dist(p) < *r)
    }
}

fn dist_to_polyline(p: Point2, vertices: &[Point2]) -> f64 {
    vertices
        .windows(2)
        .map(|w| {
            Segment::new(w[0], w[1])
                .map(|s| s.distance_to_point(p))
                .unwrap_or_else(|_| w[0].dist(p))
        })
        .fold(f64::INFINITY, f64::min)
}

/// Computes the exclusion balls for a shrinking-angle tree.
///
/// The nominal radius of the first ball is `(1/4)·2^-7·sqrt(1 + 7·16·eps^2)`
/// (a quarter of the stage-7 segment length) and successive balls shrink by
/// a factor 4. The effective radius is additionally capped at half the
/// distance from the edge point to the polylines of the two stages preceding
/// its creation, so the balls stay well inside the local geometry.
pub fn edge_ball_spec(tree: &CapTree) -> Result<EdgeBallSpec> {
    let AngleSchedule::AEps { eps } = *tree.schedule() else {
        return Err(Error::MethodMismatch(
            "edge exclusion balls are defined for the shrinking-angle (aeps) family".into(),
        ));
    };
    let centers = edge_points(tree);
    let rho1 = 0.25 * 0.5f64.powi(7) * (1.0 + 7.0 * 16.0 * eps * eps).sqrt();
    let mut rho = Vec::with_capacity(centers.len());
    let mut radii = Vec::with_capacity(centers.len());
    // Creation stage of the k-th point: the base endpoints and the root apex
    // have no earlier stages to keep distance from.
    let mut creation_stage: Vec<u32> = vec![0, 0];
    for n in 1..=tree.depth {
        creation_stage.extend(std::iter::repeat(n).take(1 << (n - 1)));
    }
    for (k, (&c, &n)) in centers.iter().zip(&creation_stage).enumerate() {
        let rk_nominal = rho1 * 4.0f64.powi(-(k as i32));
        rho.push(rk_nominal);
        let mut r = rk_nominal;
        if n >= 1 {
            r = r.min(0.5 * dist_to_polyline(c, &tree.stages[n as usize - 1]));
        }
        if n >= 2 {
            r = r.min(0.5 * dist_to_polyline(c, &tree.stages[n as usize - 2]));
        }
        radii.push(r);
    }
    Ok(EdgeBallSpec {
        centers,
        rho,
        radii,
    })
}

/// Deterministic sample of (approximate) limit-set points: midpoints of `m`
/// evenly indexed deepest-stage segments, optionally dropping points that
/// fall inside exclusion balls (so fewer than `m` points may come back).
pub fn sample_limit_set(
    tree: &CapTree,
    m: usize,
    exclusion: Option<&EdgeBallSpec>,
) -> Result<Vec<Point2>> {
    let deepest = &tree.stages[tree.depth as usize];
    let ncells = deepest.len() - 1;
    if m == 0 || m > ncells {
        return Err(Error::OutOfRange(format!(
            "sample count {m} must lie in [1, {ncells}] for a depth-{} tree",
            tree.depth
        )));
    }
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        // Evenly spread cell indices without bias at either end.
        let i = (j as u128 * ncells as u128 / m as u128) as usize;
        let p = deepest[i].lerp(deepest[i + 1], 0.5);
        if exclusion.map_or(true, |e| !e.contains(p)) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Resamples a polyline so consecutive output points are at most
/// `max_spacing` apart (vertices are always kept). Used to meet box-counting
/// resolution requirements without deepening the tree.
pub fn densify_polyline(vertices: &[Point2], max_spacing: f64) -> Result<Vec<Point2>> {
    if !(max_spacing > 0.0) {
        return Err(Error::OutOfRange(format!(
            "max_spacing must be positive, got {max_spacing}"
        )));
    }
    if vertices.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let mut out = vec![vertices[0]];
    for w in vertices.windows(2) {
        let len = w[0].dist(w[1]);
        let pieces = (len / max_spacing).ceil().max(1.0) as usize;
        for k in 1..=pieces {
            out.push(w[0].lerp(w[1], k as f64 / pieces as f64));
        }
    }
    Ok(out)
}
