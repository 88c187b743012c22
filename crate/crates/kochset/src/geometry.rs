//! Planar primitives and fitting machinery.
//!
//! Everything downstream consumes these: points, segments, affine lines in
//! canonical (angle ∈ [0, π), representative point) form, orthonormal frames,
//! double cones, acute angles between segments, and the two exact min-max
//! line fitters (through a prescribed center, and free / minimum-width
//! enclosing strip). All operations are pure functions of immutable inputs.

use crate::error::{Error, Result};
use crate::tol;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A point (or displacement vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    /// Construct a point, rejecting NaN/infinite coordinates.
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::NonFinite { context: "Point2" });
        }
        Ok(Self { x, y })
    }

    /// Unchecked constructor for internal arithmetic on already-valid data.
    pub const fn raw(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn add(self, o: Point2) -> Point2 {
        Point2::raw(self.x + o.x, self.y + o.y)
    }

    pub fn sub(self, o: Point2) -> Point2 {
        Point2::raw(self.x - o.x, self.y - o.y)
    }

    pub fn scale(self, s: f64) -> Point2 {
        Point2::raw(self.x * s, self.y * s)
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// Z-component of the cross product (signed parallelogram area).
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point2) -> f64 {
        self.sub(o).norm()
    }

    /// Linear interpolation: `self` at t = 0, `o` at t = 1.
    pub fn lerp(self, o: Point2, t: f64) -> Point2 {
        Point2::raw(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }

    /// Rotate about the origin by `angle` radians.
    pub fn rotate(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::raw(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

/// A directed segment with distinct endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub fn new(a: Point2, b: Point2) -> Result<Self> {
        if !(a.x.is_finite() && a.y.is_finite() && b.x.is_finite() && b.y.is_finite()) {
            return Err(Error::NonFinite { context: "Segment" });
        }
        if a.dist(b) == 0.0 {
            return Err(Error::DegenerateSegment);
        }
        Ok(Self { a, b })
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn midpoint(&self) -> Point2 {
        self.a.lerp(self.b, 0.5)
    }

    /// Unit direction from `a` to `b`.
    pub fn direction(&self) -> Point2 {
        let d = self.b.sub(self.a);
        d.scale(1.0 / d.norm())
    }

    /// Direction angle in (-π, π].
    pub fn angle(&self) -> f64 {
        let d = self.b.sub(self.a);
        d.y.atan2(d.x)
    }

    /// Distance from `p` to the closed segment (not its infinite extension).
    pub fn distance_to_point(&self, p: Point2) -> f64 {
        let d = self.b.sub(self.a);
        let t = (p.sub(self.a).dot(d) / d.dot(d)).clamp(0.0, 1.0);
        p.dist(self.a.lerp(self.b, t))
    }
}

/// Normalize an angle to the canonical line-direction range [0, π).
pub fn canonical_angle(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(PI);
    // rem_euclid can return exactly π for inputs like -1e-17.
    if a >= PI {
        a -= PI;
    }
    a
}

/// An (infinite) affine line in canonical form: a representative point and a
/// direction angle in [0, π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineLine {
    pub point: Point2,
    pub angle: f64,
}

impl AffineLine {
    pub fn new(point: Point2, angle: f64) -> Result<Self> {
        if !(point.x.is_finite() && point.y.is_finite() && angle.is_finite()) {
            return Err(Error::NonFinite {
                context: "AffineLine",
            });
        }
        Ok(Self {
            point,
            angle: canonical_angle(angle),
        })
    }

    /// The line through two distinct points.
    pub fn through(a: Point2, b: Point2) -> Result<Self> {
        let d = b.sub(a);
        if d.norm() == 0.0 {
            return Err(Error::DegenerateSegment);
        }
        Self::new(a, d.y.atan2(d.x))
    }

    /// The line containing a segment.
    pub fn of_segment(s: &Segment) -> Self {
        Self {
            point: s.a,
            angle: canonical_angle(s.angle()),
        }
    }

    /// Unit direction vector.
    pub fn direction(&self) -> Point2 {
        let (s, c) = self.angle.sin_cos();
        Point2::raw(c, s)
    }

    /// Unit normal vector.
    pub fn normal(&self) -> Point2 {
        let (s, c) = self.angle.sin_cos();
        Point2::raw(-s, c)
    }

    /// Signed offset of the line from the origin along its normal. Together
    /// with `angle` this is the canonical (angle, signed offset) form.
    pub fn signed_offset(&self) -> f64 {
        self.point.dot(self.normal())
    }
}

/// Euclidean distance from a point to an infinite line.
pub fn distance_to_line(p: Point2, line: &AffineLine) -> f64 {
    (p.sub(line.point).dot(line.normal())).abs()
}

/// A rigid frame: world coordinates are mapped by translating `origin` to
/// (0, 0) and then rotating by `-rotation_angle`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub origin: Point2,
    pub rotation_angle: f64,
}

impl Frame {
    /// World → frame coordinates.
    pub fn to_frame(&self, p: Point2) -> Point2 {
        p.sub(self.origin).rotate(-self.rotation_angle)
    }

    /// Frame → world coordinates.
    pub fn from_frame(&self, p: Point2) -> Point2 {
        p.rotate(self.rotation_angle).add(self.origin)
    }
}

/// The frame that maps a segment's midpoint to the origin and its endpoints
/// onto the x-axis, symmetric about 0 (with `b` on the positive side).
pub fn frame_of_segment(s: &Segment) -> Frame {
    Frame {
        origin: s.midpoint(),
        rotation_angle: s.angle(),
    }
}

/// Acute angle in [0, π/2] between the infinite extensions of two segments.
/// Symmetric, and invariant under swapping either segment's endpoints.
pub fn set_angle(s1: &Segment, s2: &Segment) -> f64 {
    let d = (canonical_angle(s1.angle()) - canonical_angle(s2.angle())).abs();
    d.min(PI - d)
}

/// Whether `p` lies in the closed double cone with the given apex, axis
/// direction, and half-angle (slope form: |perp| ≤ tan(half_angle)·|along|).
/// The apex itself is contained.
pub fn cone_contains(apex: Point2, axis: &AffineLine, half_angle: f64, p: Point2) -> bool {
    let v = p.sub(apex);
    let along = v.dot(axis.direction());
    let perp = v.dot(axis.normal());
    if along == 0.0 && perp == 0.0 {
        return true;
    }
    perp.abs() <= half_angle.tan() * along.abs() + tol::EXACT_F64
}

/// Convex hull (Andrew's monotone chain), counterclockwise, no duplicate
/// endpoint. Collinear input collapses to its two extreme points; a single
/// point yields a one-element hull.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|p, q| {
        p.x.partial_cmp(&q.x)
            .unwrap()
            .then(p.y.partial_cmp(&q.y).unwrap())
    });
    pts.dedup_by(|p, q| p.x == q.x && p.y == q.y);
    let n = pts.len();
    if n <= 2 {
        return pts;
    }
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * n);
    // Lower hull, then upper hull.
    for &p in pts.iter() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            if b.sub(a).cross(p.sub(a)) <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            if b.sub(a).cross(p.sub(a)) <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Best line through a prescribed center: minimizes, over all directions, the
/// maximum distance from the points to the line.
///
/// Exact solution: after symmetrizing the cloud about the center, the width
/// function W(φ) = maxᵢ |(pᵢ − center)·n(φ)| is the support function of the
/// symmetrized convex hull. On each arc of directions supported by one hull
/// vertex the support is a single sinusoid with its maximum inside the arc,
/// so the global minimum sits at an arc boundary — an outward edge normal of
/// the hull — where it equals the distance from the center to that edge's
/// line. One pass over the hull edges therefore finds the exact optimum.
/// Ties are broken toward the smallest canonical angle.
pub fn minmax_fit_through(points: &[Point2], center: Point2) -> Result<(AffineLine, f64)> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    // Symmetrize about the center so only hull vertices matter.
    let mut sym: Vec<Point2> = Vec::with_capacity(points.len() * 2);
    for p in points {
        let v = p.sub(center);
        sym.push(v);
        sym.push(v.scale(-1.0));
    }
    let hull = convex_hull(&sym);
    if hull.len() <= 2 {
        // All points at the center, or collinear through it: exact fit.
        let angle = hull
            .iter()
            .find(|v| v.norm() > 0.0)
            .map(|v| canonical_angle(v.y.atan2(v.x)))
            .unwrap_or(0.0);
        return Ok((AffineLine::new(center, angle)?, 0.0));
    }
    let m = hull.len();
    let mut best_angle = 0.0;
    let mut best_width = f64::INFINITY;
    for i in 0..m {
        let a = hull[i];
        let b = hull[(i + 1) % m];
        let e = b.sub(a);
        let elen = e.norm();
        if elen == 0.0 {
            continue;
        }
        // Support value at this edge's normal = distance from the center
        // (the hull's symmetry point, which lies inside) to the edge line.
        let w = (a.x * e.y - a.y * e.x).abs() / elen;
        let angle = canonical_angle(e.y.atan2(e.x));
        if w < best_width || (w == best_width && angle < best_angle) {
            best_width = w;
            best_angle = angle;
        }
    }
    Ok((AffineLine::new(center, best_angle)?, best_width))
}

/// Minimum-width enclosing strip of the point set (convex hull + antipodal
/// edge scan). The returned line is the strip's central axis and the width is
/// half the strip width: the maximum distance from any point to that line.
/// Ties are broken toward the smallest canonical angle.
pub fn minmax_fit_free(points: &[Point2]) -> Result<(AffineLine, f64)> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let hull = convex_hull(points);
    if hull.len() == 1 {
        return Ok((AffineLine::new(hull[0], 0.0)?, 0.0));
    }
    if hull.len() == 2 {
        // Collinear cloud: the strip degenerates to the line itself.
        return Ok((AffineLine::through(hull[0], hull[1])?, 0.0));
    }
    // The minimum-width strip is flush with a hull edge. Rotating calipers:
    // as the flush edge advances around the hull, the farthest (antipodal)
    // vertex advances monotonically too, so one amortized pass suffices.
    // Distance from hull[j] to the line through edge i (CCW hull: inner
    // vertices have nonnegative cross products).
    let m = hull.len();
    let dist_to_edge = |i: usize, j: usize| -> f64 {
        let a = hull[i];
        let b = hull[(i + 1) % m];
        let e = b.sub(a);
        (e.cross(hull[j].sub(a))).abs() / e.norm()
    };
    let mut best: Option<(AffineLine, f64)> = None;
    let mut j = 1usize;
    for i in 0..m {
        let a = hull[i];
        let b = hull[(i + 1) % m];
        if a.dist(b) == 0.0 {
            continue;
        }
        // Advance the antipodal pointer while the distance keeps growing;
        // the distance is unimodal in j for a convex polygon.
        while dist_to_edge(i, (j + 1) % m) > dist_to_edge(i, j) {
            j = (j + 1) % m;
        }
        let edge = AffineLine::through(a, b).expect("distinct hull vertices");
        let far_signed = hull[j].sub(edge.point).dot(edge.normal());
        let far = far_signed.abs();
        let center_point = edge.point.add(edge.normal().scale(far_signed / 2.0));
        let candidate = AffineLine::new(center_point, edge.angle)?;
        let width = far / 2.0;
        let better = match &best {
            None => true,
            Some((bl, bw)) => width < *bw || (width == *bw && candidate.angle < bl.angle),
        };
        if better {
            best = Some((candidate, width));
        }
    }
    Ok(best.expect("hull with >= 3 vertices has edges"))
}

/// Whether two convex polygons (CCW vertex lists) are disjoint (no shared
/// area and no touching), by the separating axis test with strict separation.
pub fn convex_polygons_disjoint(p: &[Point2], q: &[Point2]) -> bool {
    let axes = |poly: &[Point2]| -> Vec<Point2> {
        let m = poly.len();
        (0..m)
            .map(|i| {
                let e = poly[(i + 1) % m].sub(poly[i]);
                Point2::raw(-e.y, e.x)
            })
            .collect()
    };
    let mut all_axes = axes(p);
    all_axes.extend(axes(q));
    for axis in all_axes {
        let proj = |poly: &[Point2]| {
            let vals = poly.iter().map(|v| v.dot(axis));
            let lo = vals.clone().fold(f64::INFINITY, f64::min);
            let hi = vals.fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        };
        let (alo, ahi) = proj(p);
        let (blo, bhi) = proj(q);
        if ahi < blo || bhi < alo {
            return true;
        }
    }
    false
}

/// Whether `p` lies inside (or on the boundary of, within `slack`) the
/// triangle `(a, b, c)`.
pub fn point_in_triangle(p: Point2, a: Point2, b: Point2, c: Point2, slack: f64) -> bool {
    // Signed-area orientation of the triangle normalizes the inequalities.
    let orient = b.sub(a).cross(c.sub(a));
    let sgn = if orient >= 0.0 { 1.0 } else { -1.0 };
    for (u, v) in [(a, b), (b, c), (c, a)] {
        let e = v.sub(u);
        let d = sgn * e.cross(p.sub(u)) / e.norm();
        if d < -slack {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::raw(x, y)
    }

    #[test]
    fn distance_axis_cases() {
        let lx = AffineLine::new(p(0.0, 0.0), 0.0).unwrap();
        assert!((distance_to_line(p(0.0, 1.0), &lx) - 1.0).abs() < tol::EXACT_F64);
        let diag = AffineLine::through(p(0.0, 0.0), p(3.0, 4.0)).unwrap();
        assert!(distance_to_line(p(3.0, 4.0), &diag) < tol::EXACT_F64);
        let l45 = AffineLine::new(p(0.0, 0.0), PI / 4.0).unwrap();
        // Rotate coordinates by -π/4: (1,0) lands at (√2/2, -√2/2).
        assert!((distance_to_line(p(1.0, 0.0), &l45) - (2.0f64).sqrt() / 2.0).abs() < tol::EXACT_F64);
    }

    #[test]
    fn frame_of_segment_examples() {
        let s = Segment::new(p(0.0, 0.0), p(2.0, 0.0)).unwrap();
        let f = frame_of_segment(&s);
        assert!(f.to_frame(p(1.0, 0.0)).norm() < tol::EXACT_F64);
        let s = Segment::new(p(0.0, 0.0), p(0.0, 2.0)).unwrap();
        let f = frame_of_segment(&s);
        let fb = f.to_frame(s.b);
        assert!((fb.x - 1.0).abs() < tol::EXACT_F64 && fb.y.abs() < tol::EXACT_F64);
        let s = Segment::new(p(1.0, 1.0), p(2.0, 2.0)).unwrap();
        let f = frame_of_segment(&s);
        assert!(f.to_frame(p(1.5, 1.5)).norm() < tol::EXACT_F64);
        let fb = f.to_frame(p(2.0, 2.0));
        assert!((fb.x - (2.0f64).sqrt() / 2.0).abs() < tol::EXACT_F64);
        assert!(fb.y.abs() < tol::EXACT_F64);
    }

    #[test]
    fn set_angle_examples() {
        let sx = Segment::new(p(0.0, 0.0), p(1.0, 0.0)).unwrap();
        let sy = Segment::new(p(0.0, 0.0), p(0.0, 1.0)).unwrap();
        let sd = Segment::new(p(0.0, 0.0), p(1.0, 1.0)).unwrap();
        let sx2 = Segment::new(p(5.0, 2.0), p(7.0, 2.0)).unwrap();
        assert!((set_angle(&sx, &sy) - PI / 2.0).abs() < tol::EXACT_F64);
        assert!(set_angle(&sx, &sx2) < tol::EXACT_F64);
        assert!((set_angle(&sx, &sd) - PI / 4.0).abs() < tol::EXACT_F64);
    }

    #[test]
    fn cone_contains_slope_form() {
        let axis = AffineLine::new(p(0.0, 0.0), 0.0).unwrap();
        let half = 0.1f64.atan();
        assert!(cone_contains(p(0.0, 0.0), &axis, half, p(1.0, 0.05)));
        assert!(!cone_contains(p(0.0, 0.0), &axis, half, p(1.0, 0.2)));
        assert!(cone_contains(p(0.0, 0.0), &axis, half, p(0.0, 0.0)));
        // Double cone: the mirrored side is included too.
        assert!(cone_contains(p(0.0, 0.0), &axis, half, p(-1.0, -0.05)));
    }

    #[test]
    fn fit_through_trivial() {
        // Collinear points with the center on the line.
        let pts = [p(-1.0, -1.0), p(1.0, 1.0), p(2.0, 2.0)];
        let (line, w) = minmax_fit_through(&pts, p(0.0, 0.0)).unwrap();
        assert!(w < tol::EXACT_F64);
        assert!((line.angle - PI / 4.0).abs() < tol::EXACT_F64);
        // Single point distinct from the center.
        let (_, w) = minmax_fit_through(&[p(3.0, 1.0)], p(0.0, 0.0)).unwrap();
        assert!(w < tol::EXACT_F64);
    }

    #[test]
    fn fit_free_trivial() {
        let pts = [p(0.0, 0.0), p(1.0, 1.0), p(2.0, 2.0)];
        let (_, w) = minmax_fit_free(&pts).unwrap();
        assert!(w < tol::EXACT_F64);
        // Thin triangle: strip flush with the base, width 0.05.
        let pts = [p(0.0, 0.0), p(1.0, 0.0), p(0.5, 0.1)];
        let (_, w) = minmax_fit_free(&pts).unwrap();
        assert!((w - 0.05).abs() < tol::EXACT_F64);
        // Unit square: width half the side.
        let pts = [p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)];
        let (_, w) = minmax_fit_free(&pts).unwrap();
        assert!((w - 0.5).abs() < tol::EXACT_F64);
    }

    #[test]
    fn free_never_beats_through() {
        let pts = [p(1.0, 1.0), p(-1.0, -1.0), p(1.0, -1.0)];
        let (_, wf) = minmax_fit_free(&pts).unwrap();
        let (_, wt) = minmax_fit_through(&pts, p(0.0, 0.0)).unwrap();
        assert!(wf <= wt + tol::EXACT_F64);
    }

    #[test]
    fn polygons_disjoint() {
        let a = [p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)];
        let b = [p(2.0, 0.0), p(3.0, 0.0), p(3.0, 1.0), p(2.0, 1.0)];
        let c = [p(0.5, 0.5), p(1.5, 0.5), p(1.5, 1.5), p(0.5, 1.5)];
        assert!(convex_polygons_disjoint(&a, &b));
        assert!(!convex_polygons_disjoint(&a, &c));
    }

    #[test]
    fn triangle_membership() {
        let (a, b, c) = (p(0.0, 0.0), p(1.0, 0.0), p(0.5, 1.0));
        assert!(point_in_triangle(p(0.5, 0.2), a, b, c, 0.0));
        assert!(!point_in_triangle(p(0.5, -0.2), a, b, c, 1e-9));
        // Boundary point accepted within slack.
        assert!(point_in_triangle(p(0.5, 0.0), a, b, c, 1e-9));
    }
}
