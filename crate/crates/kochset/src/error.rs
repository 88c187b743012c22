//! Library error type.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by construction, analysis, and I/O operations.
///
/// The CLI maps these onto its exit-code contract, so variants distinguish
/// input/parse problems, guard violations, and method mismatches.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A coordinate or parameter was NaN or infinite.
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    /// A segment with coincident endpoints.
    #[error("degenerate segment: endpoints coincide")]
    DegenerateSegment,

    /// A fitter or estimator was handed no points.
    #[error("empty point set")]
    EmptyPointSet,

    /// A base angle outside the accepted range.
    #[error("base angle {theta} out of range: must lie in (0, pi/6]")]
    AngleOutOfRange { theta: f64 },

    /// A schedule that increases along descent.
    #[error("schedule not monotone along descent: theta at stage {stage} cell {cell} is {child} > parent {parent}")]
    ScheduleNotMonotone {
        stage: u32,
        cell: u64,
        child: f64,
        parent: f64,
    },

    /// A table schedule missing an entry it was asked for.
    #[error("table schedule has no angle for stage {stage} cell {cell}")]
    TableEntryMissing { stage: u32, cell: u64 },

    /// Requested tree depth beyond the hard cap.
    #[error("depth {depth} exceeds the guard ({max}): 2^depth vertices would not fit")]
    DepthGuard { depth: u32, max: u32 },

    /// A stage index beyond what a tree holds.
    #[error("stage {stage} exceeds tree depth {depth}")]
    StageExceedsDepth { stage: u32, depth: u32 },

    /// A parameter outside its documented domain.
    #[error("{0}")]
    OutOfRange(String),

    /// Sample spacing too coarse for the requested scale ladder.
    #[error("sample resolution {resolution} too coarse for scale {scale}: need at least {factor}x finer")]
    ResolutionTooCoarse {
        resolution: f64,
        scale: f64,
        factor: f64,
    },

    /// An estimator invoked on a schedule kind it does not support.
    #[error("method mismatch: {0}")]
    MethodMismatch(String),

    /// A textual schedule spec that failed to parse.
    #[error("cannot parse schedule spec: {0}")]
    ParseSpec(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
