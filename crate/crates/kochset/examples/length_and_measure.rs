//! Stage lengths, the exact length identity for the shrinking-angle family,
//! and measure convergence for a geometric schedule.

use kochset::analysis::{measure_of_image, total_length, Convergence};
use kochset::construction::{build_tree, AngleSchedule, DyadicIndex};
use kochset::geometry::{Point2, Segment};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = Segment::new(Point2::raw(0.0, 0.0), Point2::raw(1.0, 0.0))?;

    // Shrinking-angle family: stage-n length is exactly sqrt(1 + 16 n eps^2).
    let eps = 0.05;
    let tree = build_tree(&AngleSchedule::a_eps(eps)?, &base, 16)?;
    println!("stage  measured length    closed form");
    for n in [0, 4, 8, 16] {
        let measured = total_length(&tree, n)?;
        let exact = (1.0 + 16.0 * n as f64 * eps * eps).sqrt();
        println!("{n:>5}  {measured:.15}  {exact:.15}");
    }

    // Geometric angles: the stretch product converges, so the limit set has
    // finite positive length computable without building a deep tree.
    let geom = AngleSchedule::geometric(0.05, 0.5)?;
    let whole = measure_of_image(&geom, 1.0, &[DyadicIndex::ROOT], 40)?;
    println!(
        "\ngeometric schedule, whole set: measure {:.12} ({:?})",
        whole.value, whole.convergence
    );
    // Additivity: the left half of the parameter interval carries exactly
    // half the measure (the two children are congruent).
    let left = measure_of_image(&geom, 1.0, &[DyadicIndex::ROOT.left()], 40)?;
    println!(
        "left half:                     measure {:.12} (ratio {:.12})",
        left.value,
        left.value / whole.value
    );

    // Shrinking angles: divergence is detected, not silently summed.
    let diverging = measure_of_image(&AngleSchedule::a_eps(0.05)?, 1.0, &[DyadicIndex::ROOT], 40)?;
    assert_eq!(diverging.convergence, Convergence::Diverging);
    println!("shrinking schedule:            length diverges along every branch");
    Ok(())
}
