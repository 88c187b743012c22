//! The stagewise parametrization of a cap tree.
//!
//! Stage map `f_n` sends each stage-`n` segment onto the two sides of its cap
//! by a tent map; the composites `F_n = f_n ∘ … ∘ f_0` carry `[0, 1]` onto
//! the stage-(n+1) polyline, affinely on each dyadic interval. The stretch
//! product Π̃ along a dyadic descent path is the local length magnification
//! of that parametrization; whether it stays bounded (equivalently, whether
//! the squared angles are summable) separates the rectifiable schedules from
//! the non-rectifiable ones.

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::construction::{AngleSchedule, CapTree, DyadicIndex};
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::tol;

/// The stretch product at a dyadic index: the product of `(cos θ)⁻¹` over
/// the caps applied at stages `0 .. idx.stage` of its ancestor chain — the
/// factor by which the parametrization magnifies lengths on that cell,
/// so `2^{-n} · value` is exactly the length of the stage-`n` segment.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StretchProduct {
    pub index: DyadicIndex,
    pub value: f64,
}

/// Computes the stretch product along the ancestor chain of `idx`.
pub fn stretch_product(tree: &CapTree, idx: DyadicIndex) -> Result<StretchProduct> {
    if idx.stage > tree.depth() {
        return Err(Error::StageExceedsDepth {
            stage: idx.stage,
            depth: tree.depth(),
        });
    }
    let mut value = 1.0;
    for j in 0..idx.stage {
        let ancestor = DyadicIndex {
            stage: j,
            cell: idx.cell >> (idx.stage - j),
        };
        value /= tree.schedule().theta(ancestor)?.cos();
    }
    Ok(StretchProduct { index: idx, value })
}

/// The dyadic cell of order `n` containing `x` (half-open convention;
/// `x = 1` closes into the last cell).
pub fn dyadic_of_point(x: f64, n: u32) -> Result<DyadicIndex> {
    if !x.is_finite() || !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange(format!(
            "parameter {x} outside [0, 1]"
        )));
    }
    let cells = 1u64 << n;
    let i = ((x * cells as f64).floor() as u64).min(cells - 1);
    DyadicIndex::new(n, i)
}

/// Evaluator for the stage map `f_n`: sends a point on the stage-`n`
/// polyline onto the stage-(n+1) polyline by the in-frame tent map of its
/// containing segment (segment endpoints stay fixed, the midpoint goes to
/// the cap apex).
pub struct StageMap<'a> {
    tree: &'a CapTree,
    n: u32,
}

/// Builds the `f_n` evaluator (requires `n < tree.depth`).
pub fn f_stage(tree: &CapTree, n: u32) -> Result<StageMap<'_>> {
    if n >= tree.depth() {
        return Err(Error::StageExceedsDepth {
            stage: n,
            depth: tree.depth(),
        });
    }
    Ok(StageMap { tree, n })
}

impl StageMap<'_> {
    /// Applies `f_n` to a point that lies on the stage-`n` polyline (within
    /// the geometric tolerance); errors otherwise.
    pub fn eval(&self, p: Point2) -> Result<Point2> {
        let cur = self.tree.stage_vertices(self.n)?;
        let next = self.tree.stage_vertices(self.n + 1)?;
        // Locate the containing segment; shared endpoints resolve to the
        // first matching segment, which agrees with the tent map of either
        // neighbor (endpoints are fixed).
        for i in 0..cur.len() - 1 {
            let (a, b) = (cur[i], cur[i + 1]);
            let ab = b.sub(a);
            let len2 = ab.dot(ab);
            let t = p.sub(a).dot(ab) / len2;
            if !(-1e-12..=1.0 + 1e-12).contains(&t) {
                continue;
            }
            let foot = a.lerp(b, t.clamp(0.0, 1.0));
            if foot.dist(p) > tol::GEOM_ABS {
                continue;
            }
            let t = t.clamp(0.0, 1.0);
            let apex = next[2 * i + 1];
            return Ok(if t <= 0.5 {
                a.lerp(apex, 2.0 * t)
            } else {
                apex.lerp(b, 2.0 * t - 1.0)
            });
        }
        Err(Error::OutOfRange(format!(
            "point ({}, {}) does not lie on the stage-{} polyline",
            p.x, p.y, self.n
        )))
    }
}

/// Evaluates the composite `F_n(x)` for `x ∈ [0, 1]`.
///
/// `F_n` maps the dyadic interval of order `n+1` containing `x` affinely
/// onto the corresponding stage-(n+1) segment, so the composite collapses to
/// a single interpolation in the stage-(n+1) vertex array (requires
/// `n < tree.depth`). The base may be any segment; `x` is the normalized
/// parameter along it.
pub fn f_composite(tree: &CapTree, x: f64, n: u32) -> Result<Point2> {
    if n >= tree.depth() {
        return Err(Error::StageExceedsDepth {
            stage: n,
            depth: tree.depth(),
        });
    }
    let idx = dyadic_of_point(x, n + 1)?;
    let v = tree.stage_vertices(n + 1)?;
    let cells = 1u64 << (n + 1);
    let t = x * cells as f64 - idx.cell as f64;
    Ok(v[idx.cell as usize].lerp(v[idx.cell as usize + 1], t))
}

/// Per-cell boundedness verdict for the stretch product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CellVerdict {
    /// The full (limit) product stays at or below the recorded bound.
    BoundedBy { limit: f64 },
    /// The product diverges along every descent through this cell.
    Diverging,
    /// Only finite evidence exists (table schedules without tails).
    Undetermined,
}

/// Classification of one working-depth cell.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CellClass {
    pub index: DyadicIndex,
    pub verdict: CellVerdict,
    /// Σ θ² over the ancestor chain (finite evidence for the dichotomy:
    /// the product is finite iff the squared angles are summable).
    pub partial_sum_sq: f64,
    /// Π (cos θ)⁻¹ over the ancestor chain.
    pub partial_product: f64,
}

/// Classification of all cells at a working depth against a bound `m`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambdaClassification {
    pub depth: u32,
    pub bound: f64,
    pub cells: Vec<CellClass>,
}

impl LambdaClassification {
    /// Whether every cell is bounded by the classification bound.
    pub fn all_bounded(&self) -> bool {
        self.cells
            .iter()
            .all(|c| matches!(c.verdict, CellVerdict::BoundedBy { .. }))
    }

    /// Whether every cell diverges.
    pub fn all_diverging(&self) -> bool {
        self.cells
            .iter()
            .all(|c| c.verdict == CellVerdict::Diverging)
    }
}

/// How the remaining construction below a cell behaves.
enum TailKind {
    /// Σθ² converges; the product over the stages at and below the cell's
    /// working depth converges to the given finite factor.
    SquareSummable { remaining_product: f64 },
    /// Σθ² diverges, so the product diverges.
    Divergent,
    /// No parametric tail is declared.
    Unknown,
}

/// Decides tail behavior for the descent continuing below `idx` (whose
/// stage is the working depth). Tables defer to the innermost declared tail
/// covering `idx`.
fn tail_kind(schedule: &AngleSchedule, idx: DyadicIndex) -> Result<TailKind> {
    match schedule {
        // Σθ² = ∞ for a constant angle.
        AngleSchedule::Constant { .. } => Ok(TailKind::Divergent),
        // θ_n² ~ 1/n, so Σθ² diverges (harmonically).
        AngleSchedule::AEps { .. } => Ok(TailKind::Divergent),
        AngleSchedule::Geometric { .. } => Ok(TailKind::SquareSummable {
            remaining_product: product_limit_from(schedule, idx.stage)?,
        }),
        AngleSchedule::Power { p, .. } => {
            // Σ (n+1)^{-2p} converges iff 2p > 1.
            if *p > 0.5 {
                Ok(TailKind::SquareSummable {
                    remaining_product: product_limit_from(schedule, idx.stage)?,
                })
            } else {
                Ok(TailKind::Divergent)
            }
        }
        AngleSchedule::Table(t) => {
            // Re-anchor on the innermost declared tail covering idx.
            let covering = t
                .tails
                .iter()
                .filter(|tail| {
                    idx.descends_from(DyadicIndex {
                        stage: tail.stage,
                        cell: tail.cell,
                    })
                })
                .max_by_key(|tail| tail.stage);
            match covering {
                Some(tail) => {
                    let sub_idx = DyadicIndex {
                        stage: idx.stage - tail.stage,
                        cell: idx.cell - (tail.cell << (idx.stage - tail.stage)),
                    };
                    tail_kind(&tail.schedule, sub_idx)
                }
                None => Ok(TailKind::Unknown),
            }
        }
    }
}

/// Whether the stretch product converges along descents below `idx`:
/// `Some(true)` if it stays bounded (Σθ² converges), `Some(false)` if it
/// diverges, `None` when the schedule carries no parametric tail there.
pub fn descent_product_converges(
    schedule: &AngleSchedule,
    idx: DyadicIndex,
) -> Result<Option<bool>> {
    Ok(match tail_kind(schedule, idx)? {
        TailKind::SquareSummable { .. } => Some(true),
        TailKind::Divergent => Some(false),
        TailKind::Unknown => None,
    })
}

/// Product `Π_{n ≥ start} (cos θ_n)^{-1}` of a stage-uniform schedule by
/// log-summation, truncated when increments drop below
/// [`tol::PRODUCT_CONVERGENCE`].
fn product_limit_from(schedule: &AngleSchedule, start: u32) -> Result<f64> {
    let mut log_sum = 0.0;
    for n in start..start.saturating_add(50_000_000) {
        let th = schedule.theta(DyadicIndex { stage: n, cell: 0 })?;
        let term = -th.cos().ln();
        log_sum += term;
        if term < tol::PRODUCT_CONVERGENCE {
            break;
        }
    }
    Ok(log_sum.exp())
}

/// Classifies every stage-`depth` cell of the tree against the bound `m`:
/// bounded cells record the analytic limit product, divergent parametric
/// tails are flagged, and table cells without declared tails stay
/// undetermined.
pub fn classify_lambda(tree: &CapTree, depth: u32, m: f64) -> Result<LambdaClassification> {
    if depth > tree.depth() {
        return Err(Error::StageExceedsDepth {
            stage: depth,
            depth: tree.depth(),
        });
    }
    if !m.is_finite() || m < 1.0 {
        return Err(Error::OutOfRange(format!(
            "lambda bound m must be >= 1, got {m}"
        )));
    }
    let schedule = tree.schedule();
    let mut cells = Vec::with_capacity(1 << depth);
    for cell in 0..(1u64 << depth) {
        let idx = DyadicIndex { stage: depth, cell };
        let mut partial_sum_sq = 0.0;
        let mut partial_product = 1.0;
        for j in 0..depth {
            let th = schedule.theta(DyadicIndex {
                stage: j,
                cell: cell >> (depth - j),
            })?;
            partial_sum_sq += th * th;
            partial_product /= th.cos();
        }
        let verdict = match tail_kind(schedule, idx)? {
            TailKind::Divergent => CellVerdict::Diverging,
            TailKind::Unknown => CellVerdict::Undetermined,
            TailKind::SquareSummable { remaining_product } => {
                // Full limit = explicit prefix up to the working depth times
                // the convergent factor of everything below it.
                let limit = partial_product * remaining_product;
                if limit <= m {
                    CellVerdict::BoundedBy { limit }
                } else {
                    CellVerdict::Diverging // exceeds the bound; not in Λ_m
                }
            }
        };
        cells.push(CellClass {
            index: idx,
            verdict,
            partial_sum_sq,
            partial_product,
        });
    }
    Ok(LambdaClassification {
        depth,
        bound: m,
        cells,
    })
}

/// Samples `pairs` random parameter pairs from the dyadic intervals of the
/// given cells and returns the largest observed difference quotient
/// `|F_N(x) − F_N(y)| / |x − y|` at the tree's deepest stage
/// (`N = depth − 1`). Deterministic for a fixed seed.
pub fn lipschitz_ratio_scan(
    tree: &CapTree,
    cells: &[DyadicIndex],
    pairs: usize,
    seed: u64,
) -> Result<f64> {
    if cells.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let n = tree.depth() - 1;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio: f64 = 0.0;
    for _ in 0..pairs {
        let (a0, a1) = cells[rng.gen_range(0..cells.len())].interval();
        let (b0, b1) = cells[rng.gen_range(0..cells.len())].interval();
        let x = rng.gen_range(a0..a1);
        let y = rng.gen_range(b0..b1);
        if (x - y).abs() < 1e-15 {
            continue;
        }
        let fx = f_composite(tree, x, n)?;
        let fy = f_composite(tree, y, n)?;
        max_ratio = max_ratio.max(fx.dist(fy) / (x - y).abs());
    }
    Ok(max_ratio)
}

/// Tail angle sum `Σ_{n ≥ n0} θ_n` for a stage-uniform parametric schedule:
/// `Some(sum)` when convergent, `None` when divergent; errors on tables.
fn tail_angle_sum(schedule: &AngleSchedule, n0: u32) -> Result<Option<f64>> {
    match *schedule {
        AngleSchedule::Constant { .. } | AngleSchedule::AEps { .. } => Ok(None),
        AngleSchedule::Geometric { theta0, ratio } => {
            // Closed form: θ0 r^{n0} / (1 − r).
            Ok(Some(theta0 * ratio.powi(n0 as i32) / (1.0 - ratio)))
        }
        AngleSchedule::Power { theta0, p } => {
            if p <= 1.0 {
                return Ok(None); // Σ (n+1)^{-p} diverges for p ≤ 1
            }
            // Partial sum plus integral remainder (upper estimate):
            // Σ_{n ≥ N} θ0 (n+1)^{-p} ≤ θ0 N^{1-p}/(p−1).
            let mut sum = 0.0;
            let mut n = n0;
            loop {
                let remainder = theta0 * ((n + 1) as f64).powf(1.0 - p) / (p - 1.0);
                if remainder < 1e-14 || n > n0.saturating_add(1_000_000) {
                    sum += remainder;
                    break;
                }
                sum += theta0 * ((n + 1) as f64).powf(-p);
                n += 1;
            }
            Ok(Some(sum))
        }
        AngleSchedule::Table(_) => Err(Error::MethodMismatch(
            "tail angle sums need a stage-uniform parametric schedule".into(),
        )),
    }
}

/// Smallest stage `n0` from which the remaining construction is the graph of
/// an `l`-Lipschitz function over each stage-`n0` segment: the tail angle
/// sum must drop below `atan(l)/5`. Returns `None` ("never") when the angle
/// sum diverges.
pub fn lipschitz_graph_depth(schedule: &AngleSchedule, l: f64) -> Result<Option<u32>> {
    if !l.is_finite() || l <= 0.0 {
        return Err(Error::OutOfRange(format!(
            "target Lipschitz constant must be positive, got {l}"
        )));
    }
    let target = l.atan() / 5.0;
    let tail0 = match tail_angle_sum(schedule, 0)? {
        None => return Ok(None),
        Some(t) => t,
    };
    if tail0 < target {
        return Ok(Some(0));
    }
    // Tail sums decrease monotonically in n0: exponential search for an
    // upper bracket, then binary search for the smallest qualifying stage.
    let mut hi = 1u32;
    while tail_angle_sum(schedule, hi)?.expect("convergent tail") >= target {
        hi = hi.checked_mul(2).ok_or_else(|| {
            Error::OutOfRange(format!(
                "no reachable stage attains tail angle sum < {target}"
            ))
        })?;
    }
    let mut lo = hi / 2; // tail(lo) >= target (or lo = 0, handled above)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if tail_angle_sum(schedule, mid)?.expect("convergent tail") < target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}
