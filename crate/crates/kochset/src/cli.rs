//! Command-line surface: builds polylines, renders SVG, estimates
//! dimensions, writes length tables and rectifiability reports, checks the
//! approximation properties, and samples the gallery sets.
//!
//! Exit codes: 0 success, 2 parse error, 3 depth guard, 4 method mismatch,
//! 5 resolution guard, 10 property check failed; 1 for any other error.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::{
    box_counting_dim, dim_bounds_koch, dim_formula_ar, moran_solve, rectifiability_report,
    DimMethod, DimensionEstimate, MoranProblem,
};
use crate::construction::{
    build_tree, densify_polyline, gallery, AngleSchedule, BoundingBox, CapTree, GallerySet,
    TableSchedule,
};
use crate::error::{Error, Result};
use crate::geometry::{Point2, Segment};
use crate::io::{
    box_count_rows, length_rows, property_rows, read_json, svg_polyline, write_atomic,
    write_csv, write_json, PolylineDoc,
};
use crate::properties::{check_property, PropertyId};

/// Parses the textual schedule grammar:
/// `const:theta=<f>` | `aeps:eps=<f>` | `geom:theta0=<f>,ratio=<f>` |
/// `power:theta0=<f>,p=<f>` | `table:<path.json>` (a JSON table document
/// with explicit entries and optional parametric tails).
pub fn parse_schedule_spec(spec: &str) -> Result<AngleSchedule> {
    let bad = |msg: String| Error::ParseSpec(format!("schedule spec `{spec}`: {msg}"));
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| bad("expected `kind:params`".into()))?;
    // key=value parameter lists for the parametric kinds.
    let params = |keys: &[&str]| -> Result<Vec<f64>> {
        let mut vals = vec![None; keys.len()];
        for part in rest.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| bad(format!("expected `key=value`, got `{part}`")))?;
            let i = keys
                .iter()
                .position(|kk| *kk == k)
                .ok_or_else(|| bad(format!("unknown parameter `{k}`")))?;
            let f: f64 = v
                .parse()
                .map_err(|e| bad(format!("parameter `{k}`: {e}")))?;
            vals[i] = Some(f);
        }
        vals.into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| bad(format!("missing parameter `{}`", keys[i]))))
            .collect()
    };
    let wrap = |r: Result<AngleSchedule>| r.map_err(|e| bad(e.to_string()));
    match kind {
        "const" => {
            let v = params(&["theta"])?;
            wrap(AngleSchedule::constant(v[0]))
        }
        "aeps" => {
            let v = params(&["eps"])?;
            wrap(AngleSchedule::a_eps(v[0]))
        }
        "geom" => {
            let v = params(&["theta0", "ratio"])?;
            wrap(AngleSchedule::geometric(v[0], v[1]))
        }
        "power" => {
            let v = params(&["theta0", "p"])?;
            wrap(AngleSchedule::power(v[0], v[1]))
        }
        "table" => {
            let table: TableSchedule = read_json(std::path::Path::new(rest))
                .map_err(|e| bad(format!("reading table file: {e}")))?;
            wrap(AngleSchedule::table(table))
        }
        other => Err(bad(format!("unknown schedule kind `{other}`"))),
    }
}

/// Parses the gallery grammar: `n` | `lambda_delta:delta=<f>` | `lambda_sq`
/// | `gamma_eps:eps=<f>` | `aeps:eps=<f>` | `script_aeps:eps=<f>`.
pub fn parse_gallery_spec(spec: &str) -> Result<GallerySet> {
    let bad = |msg: String| Error::ParseSpec(format!("gallery spec `{spec}`: {msg}"));
    let one = |rest: &str, key: &str| -> Result<f64> {
        let (k, v) = rest
            .split_once('=')
            .ok_or_else(|| bad(format!("expected `{key}=<value>`")))?;
        if k != key {
            return Err(bad(format!("unknown parameter `{k}`")));
        }
        v.parse().map_err(|e| bad(format!("parameter `{k}`: {e}")))
    };
    match spec.split_once(':') {
        None => match spec {
            "n" => Ok(GallerySet::N),
            "lambda_sq" => Ok(GallerySet::LambdaSq),
            other => Err(bad(format!("unknown gallery set `{other}`"))),
        },
        Some(("lambda_delta", rest)) => Ok(GallerySet::LambdaDelta {
            delta: one(rest, "delta")?,
        }),
        Some(("gamma_eps", rest)) => Ok(GallerySet::GammaEps {
            eps: one(rest, "eps")?,
        }),
        Some(("aeps", rest)) => Ok(GallerySet::AEps {
            eps: one(rest, "eps")?,
        }),
        Some(("script_aeps", rest)) => Ok(GallerySet::ScriptAEps {
            eps: one(rest, "eps")?,
        }),
        Some((other, _)) => Err(bad(format!("unknown gallery set `{other}`"))),
    }
}

fn parse_property(s: &str) -> Result<PropertyId> {
    match s {
        "i" => Ok(PropertyId::I),
        "ii" => Ok(PropertyId::II),
        "iii" => Ok(PropertyId::III),
        "iv" => Ok(PropertyId::IV),
        "v" => Ok(PropertyId::V),
        "vi" => Ok(PropertyId::VI),
        "vii" => Ok(PropertyId::VII),
        "viii" => Ok(PropertyId::VIII),
        other => Err(Error::ParseSpec(format!(
            "unknown property `{other}` (expected i..viii)"
        ))),
    }
}

fn parse_f64_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::ParseSpec(format!("{what} `{t}`: {e}")))
        })
        .collect()
}

fn unit_base() -> Segment {
    Segment::new(Point2::raw(0.0, 0.0), Point2::raw(1.0, 0.0)).expect("unit base")
}

fn build_from_spec(schedule: &str, depth: u32) -> Result<CapTree> {
    let schedule = parse_schedule_spec(schedule)?;
    build_tree(&schedule, &unit_base(), depth)
}

#[derive(Debug, Parser)]
#[command(
    name = "kochset",
    about = "Koch-type fractal sets: construction, dimension, measure, and \
             plane-approximation diagnostics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    /// Schedule spec: const:theta=<f> | aeps:eps=<f> |
    /// geom:theta0=<f>,ratio=<f> | power:theta0=<f>,p=<f> | table:<path.json>
    #[arg(long)]
    schedule: String,
    /// Construction depth (stages).
    #[arg(long, default_value_t = 12)]
    depth: u32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a construction stage and write the polyline JSON document.
    Build {
        #[command(flatten)]
        schedule: ScheduleArgs,
        /// Output path for the polyline JSON.
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a polyline JSON document as SVG.
    Render {
        /// Input polyline JSON.
        #[arg(long = "in")]
        input: PathBuf,
        /// Output SVG path.
        #[arg(long)]
        out: PathBuf,
        /// Image width in pixels.
        #[arg(long, default_value_t = 800.0)]
        width: f64,
    },
    /// Estimate a dimension: moran | formula | box | bounds.
    Dim {
        #[command(flatten)]
        schedule: ScheduleArgs,
        /// Estimation method.
        #[arg(long)]
        method: String,
        /// Box-counting scales (comma-separated, decreasing).
        #[arg(long, default_value = "0.125,0.0625,0.03125,0.015625,0.0078125,0.00390625,0.001953125")]
        scales: String,
        /// Output JSON path (stdout summary always printed).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optional (scale, box_count) CSV path for the box method.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Write the (stage, total_length) CSV of a construction.
    Measure {
        #[command(flatten)]
        schedule: ScheduleArgs,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the rectifiability report JSON of a construction.
    Report {
        #[command(flatten)]
        schedule: ScheduleArgs,
        /// Output JSON path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check one approximation property on a sample.
    Check {
        /// Schedule spec for a Koch-type sample (exclusive with --gallery).
        #[arg(long)]
        schedule: Option<String>,
        /// Gallery spec: n | lambda_delta:delta=<f> | lambda_sq |
        /// gamma_eps:eps=<f> | aeps:eps=<f> | script_aeps:eps=<f>.
        #[arg(long)]
        gallery: Option<String>,
        /// Construction depth for schedule samples.
        #[arg(long, default_value_t = 12)]
        depth: u32,
        /// Sample size for gallery sets.
        #[arg(long, default_value_t = 20000)]
        count: usize,
        /// Property id: i..viii.
        #[arg(long)]
        property: String,
        /// Flatness tolerance.
        #[arg(long)]
        delta: f64,
        /// Number of centers, drawn from the sample with the seed.
        #[arg(long, default_value_t = 5)]
        centers: usize,
        /// Scale ladder (comma-separated, decreasing).
        #[arg(long, default_value = "0.25,0.125,0.0625,0.03125")]
        scales: String,
        /// RNG seed for center selection (fully determines the run).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output JSON path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optional per-center (center, rho, beta, verdict) CSV path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Sample a gallery set and write (x, y) CSV.
    Gallery {
        /// Gallery spec (see `check --gallery`).
        #[arg(long)]
        set: String,
        /// Sample size.
        #[arg(long, default_value_t = 10000)]
        count: usize,
        /// Bounding box `xmin,xmax,ymin,ymax` (required for line families).
        #[arg(long, allow_hyphen_values = true)]
        bbox: Option<String>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
}

/// Runs a parsed command. Returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

/// Maps error kinds to the documented exit codes.
fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::ParseSpec(_) | Error::Json(_) => 2,
        Error::DepthGuard { .. } | Error::StageExceedsDepth { .. } => 3,
        Error::MethodMismatch(_) => 4,
        Error::ResolutionTooCoarse { .. } => 5,
        _ => 1,
    }
}

fn execute(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Build { schedule, out } => {
            let tree = build_from_spec(&schedule.schedule, schedule.depth)?;
            let doc = PolylineDoc::from_tree(&tree)?;
            write_json(&out, &doc)?;
            println!(
                "wrote {} vertices (depth {}) to {}",
                doc.vertices.len(),
                doc.depth,
                out.display()
            );
            Ok(0)
        }
        Command::Render { input, out, width } => {
            let doc: PolylineDoc = read_json(&input)?;
            let svg = svg_polyline(&doc.points(), width)?;
            write_atomic(&out, svg.as_bytes())?;
            println!("wrote {}", out.display());
            Ok(0)
        }
        Command::Dim {
            schedule,
            method,
            scales,
            out,
            csv,
        } => {
            let est = run_dim(&schedule, &method, &scales, csv.as_deref())?;
            println!(
                "dimension ({:?}): {}{}",
                est.method,
                est.value,
                est.bounds
                    .map(|(lo, hi)| format!(" (bounds [{lo}, {hi}])"))
                    .unwrap_or_default()
            );
            if let Some(out) = out {
                write_json(&out, &est)?;
            }
            Ok(0)
        }
        Command::Measure { schedule, out } => {
            let tree = build_from_spec(&schedule.schedule, schedule.depth)?;
            write_csv(&out, &["stage", "total_length"], &length_rows(&tree)?)?;
            println!("wrote {}", out.display());
            Ok(0)
        }
        Command::Report { schedule, out } => {
            let tree = build_from_spec(&schedule.schedule, schedule.depth)?;
            let report = rectifiability_report(&tree)?;
            println!("verdict: {} ({})", report.verdict, report.criterion);
            write_json(&out, &report)?;
            Ok(0)
        }
        Command::Check {
            schedule,
            gallery: gallery_spec,
            depth,
            count,
            property,
            delta,
            centers,
            scales,
            seed,
            out,
            csv,
        } => {
            let property = parse_property(&property)?;
            let scales = parse_f64_list(&scales, "scale")?;
            // Sample the requested set, tracking its spatial resolution.
            let (points, resolution) = match (&schedule, &gallery_spec) {
                (Some(spec), None) => {
                    let tree = build_from_spec(spec, depth)?;
                    let poly = tree.polyline(depth)?;
                    let res = tree.stage_segment_length(depth)?;
                    (poly.vertices, res)
                }
                (None, Some(spec)) => {
                    let set = parse_gallery_spec(spec)?;
                    let bbox = BoundingBox::new(-2.0, 2.0, -2.0, 2.0)?;
                    let pts = gallery(&set, Some(&bbox), count)?;
                    // Conservative spacing estimate: box side over points
                    // per member; the checker re-guards against the ladder.
                    let res = 4.0 / (count as f64).sqrt();
                    (pts, res)
                }
                _ => {
                    return Err(Error::ParseSpec(
                        "check needs exactly one of --schedule or --gallery".into(),
                    ))
                }
            };
            // Deterministic center selection from the sample.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut chosen: Vec<Point2> = points
                .choose_multiple(&mut rng, centers.min(points.len()))
                .copied()
                .collect();
            chosen.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
            let report = check_property(&points, property, delta, &chosen, &scales, resolution)?;
            println!(
                "property {} delta {}: {}",
                report.property,
                report.delta,
                if report.holds { "holds" } else { "fails" }
            );
            if let Some(out) = out {
                write_json(&out, &report)?;
            }
            if let Some(path) = csv {
                write_csv(
                    &path,
                    &["center_x", "center_y", "rho", "beta", "verdict"],
                    &property_rows(&report),
                )?;
            }
            Ok(if report.holds { 0 } else { 10 })
        }
        Command::Gallery {
            set,
            count,
            bbox,
            out,
        } => {
            let set = parse_gallery_spec(&set)?;
            let bbox = match bbox {
                Some(s) => {
                    let v = parse_f64_list(&s, "bbox coordinate")?;
                    if v.len() != 4 {
                        return Err(Error::ParseSpec(
                            "bbox needs xmin,xmax,ymin,ymax".into(),
                        ));
                    }
                    Some(BoundingBox::new(v[0], v[1], v[2], v[3])?)
                }
                None => None,
            };
            let pts = gallery(&set, bbox.as_ref(), count)?;
            let rows: Vec<Vec<String>> = pts
                .iter()
                .map(|p| vec![format!("{}", p.x), format!("{}", p.y)])
                .collect();
            write_csv(&out, &["x", "y"], &rows)?;
            println!("wrote {} points to {}", rows.len(), out.display());
            Ok(0)
        }
    }
}

fn run_dim(
    schedule: &ScheduleArgs,
    method: &str,
    scales: &str,
    csv: Option<&std::path::Path>,
) -> Result<DimensionEstimate> {
    let sched = parse_schedule_spec(&schedule.schedule)?;
    match method {
        "formula" => {
            let AngleSchedule::Constant { theta } = sched else {
                return Err(Error::MethodMismatch(
                    "the closed-form dimension needs a constant-angle schedule".into(),
                ));
            };
            Ok(DimensionEstimate {
                value: dim_formula_ar(theta)?,
                method: DimMethod::AngleFormula,
                bounds: None,
                fit: None,
            })
        }
        "moran" => {
            let AngleSchedule::Constant { theta } = sched else {
                return Err(Error::MethodMismatch(
                    "the similarity-dimension equation needs a constant-angle schedule".into(),
                ));
            };
            let l = 0.5 / theta.cos();
            Ok(DimensionEstimate {
                value: moran_solve(&MoranProblem::new(vec![l, l])?),
                method: DimMethod::Moran,
                bounds: None,
                fit: None,
            })
        }
        "box" => {
            let tree = build_tree(&sched, &unit_base(), schedule.depth)?;
            let poly = tree.polyline(schedule.depth)?;
            let scales = parse_f64_list(scales, "scale")?;
            // Densify along the polyline so no segment straddles a box at
            // the finest scale without being sampled inside it.
            let min_scale = scales.iter().cloned().fold(f64::INFINITY, f64::min);
            let resolution = min_scale / crate::tol::BOX_RESOLUTION_FACTOR;
            let points = densify_polyline(&poly.vertices, resolution)?;
            let est = box_counting_dim(&points, &scales, resolution)?;
            if let Some(path) = csv {
                write_csv(
                    path,
                    &["scale", "box_count"],
                    &box_count_rows(est.fit.as_ref().expect("box fit present")),
                )?;
            }
            Ok(est)
        }
        "bounds" => {
            let tree = build_tree(&sched, &unit_base(), schedule.depth)?;
            dim_bounds_koch(&tree)
        }
        other => Err(Error::ParseSpec(format!(
            "unknown dimension method `{other}` (expected moran|formula|box|bounds)"
        ))),
    }
}
