//! Compares the four dimension estimators on the same constant-angle curve:
//! the closed-form angle formula, the similarity-dimension equation, a
//! box-counting fit, and the limit-angle sandwich bounds.

use kochset::analysis::{
    box_counting_dim, dim_bounds_koch, dim_formula_ar, moran_solve, MoranProblem,
};
use kochset::construction::{build_tree, densify_polyline, AngleSchedule};
use kochset::geometry::{Point2, Segment};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let theta = std::f64::consts::FRAC_PI_6;
    let base = Segment::new(Point2::raw(0.0, 0.0), Point2::raw(1.0, 0.0))?;

    // Closed form: -ln 2 / ln(1 / (2 cos theta)).
    println!("angle formula      {:.6}", dim_formula_ar(theta)?);

    // Same number from the similarity-dimension equation for two maps of
    // ratio 1/(2 cos theta).
    let l = 0.5 / theta.cos();
    println!(
        "similarity eq      {:.6}",
        moran_solve(&MoranProblem::new(vec![l, l])?)
    );

    // Box counting on a depth-12 build over dyadic scales 2^-3..2^-9.
    let tree = build_tree(&AngleSchedule::constant(theta)?, &base, 12)?;
    let scales: Vec<f64> = (3..=9).map(|k| 0.5f64.powi(k)).collect();
    let spacing = scales.last().unwrap() / 4.0;
    let points = densify_polyline(&tree.polyline(12)?.vertices, spacing)?;
    let est = box_counting_dim(&points, &scales, spacing)?;
    println!(
        "box counting       {:.6}  (max log residual {:.3})",
        est.value,
        est.fit.as_ref().unwrap().max_abs_residual
    );

    // Sandwich from the limit angle: constant schedules pin it exactly.
    let bounds = dim_bounds_koch(&tree)?;
    let (lo, hi) = bounds.bounds.unwrap();
    println!("angle bounds       [{lo:.6}, {hi:.6}]");

    // A shrinking-angle curve has limit angle 0, so dimension 1 despite
    // being far from rectifiable.
    let shrinking = build_tree(&AngleSchedule::a_eps(0.01)?, &base, 8)?;
    let (lo, hi) = dim_bounds_koch(&shrinking)?.bounds.unwrap();
    println!("shrinking bounds   [{lo:.6}, {hi:.6}]");
    Ok(())
}
