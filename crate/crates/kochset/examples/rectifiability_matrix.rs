//! Rectifiability verdicts across the schedule families: the same recursive
//! construction lands on either side of rectifiability depending only on how
//! fast the base angles shrink.

use kochset::analysis::rectifiability_report;
use kochset::construction::{build_tree, AngleSchedule};
use kochset::geometry::{Point2, Segment};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = Segment::new(Point2::raw(0.0, 0.0), Point2::raw(1.0, 0.0))?;
    let cases = [
        ("constant 0.2", AngleSchedule::constant(0.2)?),
        ("shrinking eps=0.01", AngleSchedule::a_eps(0.01)?),
        ("geometric 0.1 x 0.5", AngleSchedule::geometric(0.1, 0.5)?),
        ("power p=1.0", AngleSchedule::power(0.05, 1.0)?),
        ("power p=2.5", AngleSchedule::power(0.05, 2.5)?),
    ];
    for (name, schedule) in cases {
        let tree = build_tree(&schedule, &base, 8)?;
        let report = rectifiability_report(&tree)?;
        println!("{name:20} {:16} {}", report.verdict.to_string(), report.criterion);
    }
    Ok(())
}
