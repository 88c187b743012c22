//! Base-angle schedules over the dyadic cap tree.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted base angle.
///
/// At pi/6 a child cap's apex lands exactly on its grandparent's base line;
/// beyond that, sibling caps start to overlap and the construction stops
/// being a tree of essentially disjoint triangles.
pub const MAX_THETA: f64 = PI / 6.0;

/// Address of a cap (equivalently, of a stage segment): stage `n`, cell
/// `i ∈ [0, 2^n)` counted left to right along the stage polyline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DyadicIndex {
    /// Stage (tree depth of the cap's base segment).
    pub stage: u32,
    /// Cell index within the stage, left to right.
    pub cell: u64,
}

impl DyadicIndex {
    /// Root index (stage 0, cell 0).
    pub const ROOT: DyadicIndex = DyadicIndex { stage: 0, cell: 0 };

    /// Builds an index, rejecting cells outside `[0, 2^stage)`.
    pub fn new(stage: u32, cell: u64) -> Result<Self> {
        if stage < 64 && cell >> stage != 0 {
            return Err(Error::OutOfRange(format!(
                "cell {cell} out of range for stage {stage} (must be < 2^{stage})"
            )));
        }
        Ok(DyadicIndex { stage, cell })
    }

    /// Left child (first half of the dyadic interval).
    pub fn left(self) -> DyadicIndex {
        DyadicIndex {
            stage: self.stage + 1,
            cell: self.cell << 1,
        }
    }

    /// Right child (second half of the dyadic interval).
    pub fn right(self) -> DyadicIndex {
        DyadicIndex {
            stage: self.stage + 1,
            cell: (self.cell << 1) | 1,
        }
    }

    /// Parent index, or `None` at the root.
    pub fn parent(self) -> Option<DyadicIndex> {
        if self.stage == 0 {
            None
        } else {
            Some(DyadicIndex {
                stage: self.stage - 1,
                cell: self.cell >> 1,
            })
        }
    }

    /// Whether `self` is `other` or a descendant of `other`.
    pub fn descends_from(self, other: DyadicIndex) -> bool {
        self.stage >= other.stage && (self.cell >> (self.stage - other.stage)) == other.cell
    }

    /// The dyadic interval `[i 2^-n, (i+1) 2^-n]` this index addresses.
    pub fn interval(self) -> (f64, f64) {
        let w = 0.5f64.powi(self.stage as i32);
        (self.cell as f64 * w, (self.cell as f64 + 1.0) * w)
    }
}

/// One explicit angle in a [`TableSchedule`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub stage: u32,
    pub cell: u64,
    pub theta: f64,
}

/// A declared parametric continuation below a table anchor: every descendant
/// of `(stage, cell)` takes its angle from `schedule`, re-based so the anchor
/// itself is that schedule's stage 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailDecl {
    pub stage: u32,
    pub cell: u64,
    pub schedule: Box<AngleSchedule>,
}

/// Explicit per-cell angles plus optional parametric tails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableSchedule {
    /// Explicit angles; looked up before tails.
    pub entries: Vec<TableEntry>,
    /// Parametric continuations for whole subtrees.
    #[serde(default)]
    pub tails: Vec<TailDecl>,
}

/// Assigns the cap base angle `theta(n, i)` to every dyadic index.
///
/// All constructors validate eagerly: every reachable angle must lie in
/// `(0, MAX_THETA]` and be nonincreasing from parent to child.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub enum AngleSchedule {
    /// The same angle at every index (the classic Koch family).
    #[serde(rename = "const")]
    Constant { theta: f64 },

    /// The shrinking-angle family: `theta_n = atan(4 eps / sqrt(1 + 16 n eps^2))`.
    ///
    /// Chosen so that the cap height at stage `n` is exactly `2^(1-n) eps` and
    /// the stage-`n` total length is exactly `sqrt(1 + 16 n eps^2)`.
    #[serde(rename = "aeps")]
    AEps { eps: f64 },

    /// Geometric decay: `theta_n = theta0 * ratio^n` with `ratio` in (0, 1).
    #[serde(rename = "geom")]
    Geometric { theta0: f64, ratio: f64 },

    /// Power decay: `theta_n = theta0 * (n + 1)^(-p)` with `p > 0`.
    #[serde(rename = "power")]
    Power { theta0: f64, p: f64 },

    /// Explicit per-cell table with optional parametric tails.
    #[serde(rename = "table")]
    Table(TableSchedule),
}

fn check_theta(theta: f64) -> Result<()> {
    if !theta.is_finite() {
        return Err(Error::NonFinite {
            context: "schedule angle",
        });
    }
    // EXACT_F64 slack so theta = pi/6 written in decimal is accepted.
    if theta <= 0.0 || theta > MAX_THETA + crate::tol::EXACT_F64 {
        return Err(Error::AngleOutOfRange { theta });
    }
    Ok(())
}

impl AngleSchedule {
    /// Constant schedule; `theta` must lie in `(0, MAX_THETA]`.
    pub fn constant(theta: f64) -> Result<Self> {
        check_theta(theta)?;
        Ok(AngleSchedule::Constant { theta })
    }

    /// Shrinking-angle schedule; requires `atan(4 eps) <= MAX_THETA`,
    /// i.e. `eps <= tan(MAX_THETA)/4 ≈ 0.1443`.
    pub fn a_eps(eps: f64) -> Result<Self> {
        if !eps.is_finite() || eps <= 0.0 {
            return Err(Error::OutOfRange(format!(
                "aeps parameter eps must be positive and finite, got {eps}"
            )));
        }
        check_theta((4.0 * eps).atan())?;
        Ok(AngleSchedule::AEps { eps })
    }

    /// Geometric-decay schedule; `theta0` in `(0, MAX_THETA]`, `ratio` in (0, 1).
    pub fn geometric(theta0: f64, ratio: f64) -> Result<Self> {
        check_theta(theta0)?;
        if !ratio.is_finite() || ratio <= 0.0 || ratio >= 1.0 {
            return Err(Error::OutOfRange(format!(
                "geometric ratio must lie in (0, 1), got {ratio}"
            )));
        }
        Ok(AngleSchedule::Geometric { theta0, ratio })
    }

    /// Power-decay schedule; `theta0` in `(0, MAX_THETA]`, `p > 0`.
    pub fn power(theta0: f64, p: f64) -> Result<Self> {
        check_theta(theta0)?;
        if !p.is_finite() || p <= 0.0 {
            return Err(Error::OutOfRange(format!(
                "power exponent p must be positive, got {p}"
            )));
        }
        Ok(AngleSchedule::Power { theta0, p })
    }

    /// Table schedule; validates every entry's range, parent/child
    /// monotonicity among the listed entries, cell bounds, and each tail
    /// (recursively, plus monotonicity across the splice point when the
    /// anchor's parent angle is known).
    pub fn table(table: TableSchedule) -> Result<Self> {
        let sched = AngleSchedule::Table(table);
        sched.validate_table()?;
        Ok(sched)
    }

    fn validate_table(&self) -> Result<()> {
        let AngleSchedule::Table(t) = self else {
            unreachable!("validate_table on non-table schedule");
        };
        for e in &t.entries {
            DyadicIndex::new(e.stage, e.cell)?;
            check_theta(e.theta)?;
            if let Some(parent) = DyadicIndex::new(e.stage, e.cell)?.parent() {
                if let Ok(pt) = self.theta(parent) {
                    if e.theta > pt + crate::tol::EXACT_F64 {
                        return Err(Error::ScheduleNotMonotone {
                            stage: e.stage,
                            cell: e.cell,
                            child: e.theta,
                            parent: pt,
                        });
                    }
                }
            }
        }
        for tail in &t.tails {
            let anchor = DyadicIndex::new(tail.stage, tail.cell)?;
            tail.schedule.validate()?;
            let anchor_theta = tail.schedule.theta(DyadicIndex::ROOT)?;
            if let Some(parent) = anchor.parent() {
                if let Ok(pt) = self.theta(parent) {
                    if anchor_theta > pt + crate::tol::EXACT_F64 {
                        return Err(Error::ScheduleNotMonotone {
                            stage: tail.stage,
                            cell: tail.cell,
                            child: anchor_theta,
                            parent: pt,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Re-validates a schedule obtained from deserialization.
    pub fn validate(&self) -> Result<()> {
        match *self {
            AngleSchedule::Constant { theta } => check_theta(theta),
            AngleSchedule::AEps { eps } => AngleSchedule::a_eps(eps).map(|_| ()),
            AngleSchedule::Geometric { theta0, ratio } => {
                AngleSchedule::geometric(theta0, ratio).map(|_| ())
            }
            AngleSchedule::Power { theta0, p } => AngleSchedule::power(theta0, p).map(|_| ()),
            AngleSchedule::Table(_) => self.validate_table(),
        }
    }

    /// The cap base angle at `idx`.
    ///
    /// Parametric kinds depend only on the stage; tables fall back to the
    /// innermost declared tail covering the index and error if neither an
    /// entry nor a tail covers it.
    pub fn theta(&self, idx: DyadicIndex) -> Result<f64> {
        let n = idx.stage;
        match self {
            AngleSchedule::Constant { theta } => Ok(*theta),
            AngleSchedule::AEps { eps } => {
                let n = n as f64;
                Ok((4.0 * eps / (1.0 + 16.0 * n * eps * eps).sqrt()).atan())
            }
            AngleSchedule::Geometric { theta0, ratio } => Ok(theta0 * ratio.powi(n as i32)),
            AngleSchedule::Power { theta0, p } => Ok(theta0 * ((n + 1) as f64).powf(-p)),
            AngleSchedule::Table(t) => {
                for e in &t.entries {
                    if e.stage == n && e.cell == idx.cell {
                        return Ok(e.theta);
                    }
                }
                // Innermost (deepest-anchored) covering tail wins, so nested
                // declarations refine outer ones.
                let mut best: Option<&TailDecl> = None;
                for tail in &t.tails {
                    let anchor = DyadicIndex {
                        stage: tail.stage,
                        cell: tail.cell,
                    };
                    if idx.descends_from(anchor) && best.map_or(true, |b| tail.stage > b.stage) {
                        best = Some(tail);
                    }
                }
                if let Some(tail) = best {
                    let sub = DyadicIndex {
                        stage: n - tail.stage,
                        cell: idx.cell - (tail.cell << (n - tail.stage)),
                    };
                    return tail.schedule.theta(sub);
                }
                Err(Error::TableEntryMissing {
                    stage: n,
                    cell: idx.cell,
                })
            }
        }
    }

    /// Whether the angle depends only on the stage (true for every kind
    /// except tables). Stage-uniform schedules admit closed-form stage sums.
    pub fn is_stage_uniform(&self) -> bool {
        !matches!(self, AngleSchedule::Table(_))
    }

    /// Sum of `theta_k` for stages `k = 0..n` of a stage-uniform schedule.
    ///
    /// Errors with a method mismatch on table schedules, whose angles are
    /// path-dependent.
    pub fn angle_partial_sum(&self, n: u32) -> Result<f64> {
        if !self.is_stage_uniform() {
            return Err(Error::MethodMismatch(
                "angle partial sums need a stage-uniform schedule, not a table".into(),
            ));
        }
        let mut s = 0.0;
        for k in 0..n {
            s += self.theta(DyadicIndex { stage: k, cell: 0 })?;
        }
        Ok(s)
    }
}
