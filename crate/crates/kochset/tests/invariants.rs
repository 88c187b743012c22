//! Property-based invariant suites: structural facts that must hold for
//! every valid schedule, cloud, and tolerance, not just the worked examples.

use proptest::prelude::*;

use kochset::analysis::{moran_solve, total_length, MoranProblem};
use kochset::construction::{build_tree, AngleSchedule, DyadicIndex};
use kochset::geometry::{
    distance_to_line, minmax_fit_free, minmax_fit_through, Point2, Segment,
};
use kochset::io::PolylineDoc;
use kochset::properties::{check_property, PropertyId};

fn unit_base() -> Segment {
    Segment::new(Point2::raw(0.0, 0.0), Point2::raw(1.0, 0.0)).unwrap()
}

/// Any valid parametric schedule.
fn schedule_strategy() -> impl Strategy<Value = AngleSchedule> {
    prop_oneof![
        (1e-4..0.5f64).prop_map(|t| AngleSchedule::constant(t).unwrap()),
        (1e-4..0.12f64).prop_map(|e| AngleSchedule::a_eps(e).unwrap()),
        ((1e-4..0.5f64), (0.1..0.99f64))
            .prop_map(|(t, r)| AngleSchedule::geometric(t, r).unwrap()),
        ((1e-4..0.5f64), (0.2..3.0f64))
            .prop_map(|(t, p)| AngleSchedule::power(t, p).unwrap()),
    ]
}

/// Random point cloud of 3..=40 points with O(1)..O(10) coordinates.
fn cloud_strategy() -> impl Strategy<Value = Vec<Point2>> {
    prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 3..=40)
        .prop_map(|v| v.into_iter().map(|(x, y)| Point2::raw(x, y)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Base angles never increase along any descent path.
    #[test]
    fn angles_monotone_along_descent(
        schedule in schedule_strategy(),
        path in prop::collection::vec(any::<bool>(), 1..12),
    ) {
        let mut idx = DyadicIndex::ROOT;
        let mut prev = schedule.theta(idx).unwrap();
        for go_left in path {
            idx = if go_left { idx.left() } else { idx.right() };
            let theta = schedule.theta(idx).unwrap();
            prop_assert!(theta <= prev + 1e-12);
            prev = theta;
        }
    }

    /// Every refinement stretches: stage lengths are nondecreasing, and each
    /// stage-n vertex survives (at doubled index) into stage n+1.
    #[test]
    fn stages_nest_and_lengths_grow(schedule in schedule_strategy()) {
        let depth = 6;
        let tree = build_tree(&schedule, &unit_base(), depth).unwrap();
        let mut prev_len = 0.0;
        for n in 0..=depth {
            let len = total_length(&tree, n).unwrap();
            prop_assert!(len >= prev_len - 1e-12);
            prev_len = len;
        }
        for n in 0..depth {
            let coarse = tree.stage_vertices(n).unwrap();
            let fine = tree.stage_vertices(n + 1).unwrap();
            for (i, v) in coarse.iter().enumerate() {
                prop_assert!(v.dist(fine[2 * i]) < 1e-12);
            }
        }
    }

    /// The unconstrained min-max line never fits worse than the line forced
    /// through any particular center.
    #[test]
    fn free_fit_no_worse_than_through(cloud in cloud_strategy(), ci in 0usize..40) {
        let center = cloud[ci % cloud.len()];
        let (_, through) = minmax_fit_through(&cloud, center).unwrap();
        let (_, free) = minmax_fit_free(&cloud).unwrap();
        prop_assert!(free <= through + 1e-9, "free {free} > through {through}");
    }

    /// Both fitters return a line that achieves the reported width, and no
    /// line from a coarse probe grid beats them.
    #[test]
    fn fits_are_achieved_and_grid_optimal(cloud in cloud_strategy()) {
        let center = cloud[0];
        let (line_t, w_t) = minmax_fit_through(&cloud, center).unwrap();
        let (line_f, w_f) = minmax_fit_free(&cloud).unwrap();
        let max_t = cloud.iter().map(|p| distance_to_line(*p, &line_t))
            .fold(0.0f64, f64::max);
        let max_f = cloud.iter().map(|p| distance_to_line(*p, &line_f))
            .fold(0.0f64, f64::max);
        prop_assert!((max_t - w_t).abs() < 1e-9);
        prop_assert!((max_f - w_f).abs() < 1e-9);
        // A 512-angle probe can only do worse (both are minima over lines).
        for k in 0..512 {
            let angle = std::f64::consts::PI * k as f64 / 512.0;
            let probe = kochset::geometry::AffineLine::new(center, angle).unwrap();
            let w = cloud.iter().map(|p| distance_to_line(*p, &probe))
                .fold(0.0f64, f64::max);
            prop_assert!(w >= w_t - 1e-9);
        }
    }

    /// Flatness verdicts are monotone in the tolerance: what holds at delta
    /// holds at any larger delta.
    #[test]
    fn flatness_monotone_in_delta(
        seed in 0u64..1000,
        delta in 0.05..0.5f64,
        factor in 1.0..4.0f64,
    ) {
        // A deterministic wiggly sample parameterized by the seed.
        let pts: Vec<Point2> = (0..400)
            .map(|i| {
                let x = i as f64 / 400.0;
                Point2::raw(x, 0.05 * (x * 20.0 + seed as f64).sin())
            })
            .collect();
        let centers = [pts[100], pts[300]];
        let scales = [0.25, 0.125, 0.0625];
        for property in [PropertyId::I, PropertyId::II] {
            let tight = check_property(&pts, property, delta, &centers, &scales, 1.0 / 400.0)
                .unwrap();
            let loose = check_property(
                &pts, property, delta * factor, &centers, &scales, 1.0 / 400.0,
            ).unwrap();
            prop_assert!(!tight.holds || loose.holds);
        }
    }

    /// Rigid motions and uniform scalings move the fitted width linearly,
    /// so beta = width / rho is invariant.
    #[test]
    fn fit_width_equivariant(
        cloud in cloud_strategy(),
        angle in 0.0..std::f64::consts::TAU,
        s in 0.1..10.0f64,
        tx in -5.0..5.0f64,
        ty in -5.0..5.0f64,
    ) {
        let center = cloud[0];
        let shift = Point2::raw(tx, ty);
        let moved: Vec<Point2> = cloud
            .iter()
            .map(|p| p.rotate(angle).scale(s).add(shift))
            .collect();
        let (_, w) = minmax_fit_through(&cloud, center).unwrap();
        let (_, w2) = minmax_fit_through(&moved, center.rotate(angle).scale(s).add(shift))
            .unwrap();
        prop_assert!((w2 - s * w).abs() < 1e-7 * (1.0 + w2), "{w2} vs {}", s * w);
        let (_, f) = minmax_fit_free(&cloud).unwrap();
        let (_, f2) = minmax_fit_free(&moved).unwrap();
        prop_assert!((f2 - s * f).abs() < 1e-7 * (1.0 + f2));
    }

    /// The similarity-dimension solver really solves its equation.
    #[test]
    fn moran_residual_vanishes(
        ratios in prop::collection::vec(0.05..0.9f64, 2..6),
    ) {
        let d = moran_solve(&MoranProblem::new(ratios.clone()).unwrap());
        let residual: f64 = ratios.iter().map(|r| r.powf(d)).sum::<f64>() - 1.0;
        prop_assert!(residual.abs() < 1e-10, "residual {residual}");
    }

    /// Polyline documents survive a JSON round trip bit-exactly.
    #[test]
    fn polyline_json_roundtrip(schedule in schedule_strategy()) {
        let tree = build_tree(&schedule, &unit_base(), 5).unwrap();
        let doc = PolylineDoc::from_tree(&tree).unwrap();
        let bytes = serde_json::to_vec(&doc).unwrap();
        let back: PolylineDoc = serde_json::from_slice(&bytes).unwrap();
        prop_assert_eq!(&doc, &back);
        prop_assert_eq!(serde_json::to_vec(&back).unwrap(), bytes);
    }
}
