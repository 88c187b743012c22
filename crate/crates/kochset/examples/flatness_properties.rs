//! Checks the eight finite-scale plane-approximation properties on a
//! shrinking-angle curve, shows which scales are admissible for a tolerance,
//! and walks a shrinking-tolerance ladder.

use kochset::construction::{build_tree, AngleSchedule};
use kochset::geometry::{Point2, Segment};
use kochset::properties::{
    admissible_scales, check_property, delta_ladder_check, PropertyId,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = Segment::new(Point2::raw(0.0, 0.0), Point2::raw(1.0, 0.0))?;
    let depth = 14;
    let tree = build_tree(&AngleSchedule::a_eps(0.01)?, &base, depth)?;
    let points = tree.polyline(depth)?.vertices;
    let resolution = tree.stage_segment_length(depth)?;

    // Which dyadic scales can a tolerance of 0.3 actually certify? A scale
    // is admissible when the construction below it turns by so little that a
    // single line can absorb the wiggle.
    let candidate: Vec<f64> = (2..=8).map(|k| 0.5f64.powi(k)).collect();
    let delta = 0.3;
    let scales = admissible_scales(&tree, delta, &candidate)?;
    println!("admissible scales for delta={delta}: {scales:?}");

    // Sample centers along the curve.
    let centers: Vec<Point2> = (1..=5).map(|i| points[i * points.len() / 6]).collect();

    println!("\nproperty  verdict   line mode");
    for property in [
        PropertyId::I,
        PropertyId::II,
        PropertyId::III,
        PropertyId::IV,
        PropertyId::V,
        PropertyId::VI,
        PropertyId::VII,
        PropertyId::VIII,
    ] {
        let report = check_property(&points, property, delta, &centers, &scales, resolution)?;
        println!(
            "{:>8}  {:7}   {}",
            report.property.to_string(),
            if report.holds { "holds" } else { "fails" },
            report.line_mode
        );
    }

    // Shrink the tolerance until the through-center version breaks.
    let ladder = delta_ladder_check(
        &points,
        PropertyId::I,
        &[0.5, 0.4, 0.3, 0.25],
        &centers,
        &scales,
        resolution,
    )?;
    println!(
        "\nsmallest tolerance still holding on this ladder: {:?}",
        ladder.smallest_delta_holding
    );
    Ok(())
}
