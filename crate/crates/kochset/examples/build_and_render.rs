//! Builds one curve per schedule family and writes polyline JSON + SVG for
//! each into a temporary directory.

use kochset::construction::{build_tree, AngleSchedule};
use kochset::geometry::{Point2, Segment};
use kochset::io::{svg_polyline, write_atomic, write_json, PolylineDoc};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = std::env::temp_dir().join("kochset-build-example");
    std::fs::create_dir_all(&out_dir)?;
    let base = Segment::new(Point2::raw(0.0, 0.0), Point2::raw(1.0, 0.0))?;

    let schedules = [
        ("classic", AngleSchedule::constant(std::f64::consts::FRAC_PI_6)?),
        ("shrinking", AngleSchedule::a_eps(0.05)?),
        ("geometric", AngleSchedule::geometric(0.3, 0.5)?),
        ("power", AngleSchedule::power(0.3, 1.5)?),
    ];

    for (name, schedule) in schedules {
        let tree = build_tree(&schedule, &base, 8)?;
        let doc = PolylineDoc::from_tree(&tree)?;
        let json_path = out_dir.join(format!("{name}.json"));
        write_json(&json_path, &doc)?;
        let svg = svg_polyline(&doc.points(), 800.0)?;
        let svg_path = out_dir.join(format!("{name}.svg"));
        write_atomic(&svg_path, svg.as_bytes())?;
        println!(
            "{name:9} depth {} -> {} vertices, {}",
            doc.depth,
            doc.vertices.len(),
            svg_path.display()
        );
    }
    Ok(())
}
