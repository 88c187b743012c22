//! The natural parametrization of the limit set: evaluates the composite
//! stage map at dyadic and non-dyadic parameters, measures worst-case
//! stretch ratios, and finds from which stage a tail becomes a Lipschitz
//! graph.

use kochset::construction::{build_tree, AngleSchedule, DyadicIndex};
use kochset::geometry::{Point2, Segment};
use kochset::parametrization::{
    f_composite, lipschitz_graph_depth, lipschitz_ratio_scan, stretch_product,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = Segment::new(Point2::raw(0.0, 0.0), Point2::raw(1.0, 0.0))?;
    let schedule = AngleSchedule::geometric(0.1, 0.5)?;
    let depth = 16;
    let tree = build_tree(&schedule, &base, depth)?;

    // Endpoints are fixed; the midpoint parameter lands on the stage-1 apex.
    for x in [0.0, 0.25, 0.5, 1.0 / 3.0, 1.0] {
        let p = f_composite(&tree, x, depth - 1)?;
        println!("f({x:.6}) = ({:.6}, {:.6})", p.x, p.y);
    }

    // Local stretch along a descent path: the product of 1/cos(theta_n).
    let mut idx = DyadicIndex::ROOT;
    for _ in 0..8 {
        idx = idx.left();
    }
    let sp = stretch_product(&tree, idx)?;
    println!("\nstretch product down 8 left turns: {:.9}", sp.value);

    // Worst stretch ratio |f(x)-f(y)| / |x-y| over random parameter pairs:
    // bounded for this schedule (the limit map is bi-Lipschitz-ish here).
    let ratio = lipschitz_ratio_scan(&tree, &[DyadicIndex::ROOT], 10_000, 1)?;
    println!("max stretch ratio over 10k random pairs: {:.6}", ratio);

    // From which stage is every remaining piece a 1-Lipschitz graph?
    let stage = lipschitz_graph_depth(&schedule, 1.0)?;
    println!("tail is a 1-Lipschitz graph from stage: {stage:?}");
    let never = lipschitz_graph_depth(&AngleSchedule::a_eps(0.01)?, 1.0)?;
    println!("shrinking-angle family:                 {never:?} (never)");
    Ok(())
}
