//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval: lo = {lo}, hi = {hi} (need lo < hi, both finite)")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("interval ({lo}, {hi}] is not contained in the domain ({dlo}, {dhi}]")]
    IntervalOutsideDomain { lo: f64, hi: f64, dlo: f64, dhi: f64 },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("pseudo-empirical measure needs at least one mark")]
    EmptyPem,

    #[error("mark {value} lies outside the domain ({lo}, {hi}]")]
    MarkOutsideDomain { value: f64, lo: f64, hi: f64 },

    #[error("no valid split point in ({lo}, {hi}]: midpoint and shifted midpoint both collide with atoms")]
    NoValidSplit { lo: f64, hi: f64 },

    #[error("partition level {level} unavailable (built up to {max})")]
    LevelUnavailable { level: usize, max: usize },

    #[error("cell ({lo}, {hi}] at level {level} is not a continuity interval of the target")]
    NotContinuityInterval { lo: f64, hi: f64, level: usize },

    #[error(
        "pool too thin for the target: cell ({lo}, {hi}] at level {level} has mass {mass} but only {count} pool marks (threshold {threshold})"
    )]
    MembershipViolation { lo: f64, hi: f64, level: usize, mass: f64, count: u64, threshold: u64 },

    #[error("mean function leaves [0, 1]: value {value} at t = {t}")]
    MeanOutOfRange { t: f64, value: f64 },

    #[error("invalid mean function: {0}")]
    InvalidMean(String),

    #[error("invalid pool scheme: {0}")]
    InvalidScheme(String),

    #[error("pool times contain a duplicate at index {index} (t = {t})")]
    DuplicateTime { index: usize, t: f64 },

    #[error("pool time {t} at index {index} lies outside (0, {horizon}]")]
    TimeOutsideHorizon { index: usize, t: f64, horizon: f64 },

    #[error("instant t = {t} has already been drawn")]
    DoubleDraw { t: f64 },

    #[error("pool index {index} out of range (pool has {len} instants)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("planner exhausted cell ({lo}, {hi}] at step {step}: no unused pool mark left inside")]
    CellExhausted { lo: f64, hi: f64, step: u64 },

    #[error("plan asks for {requested} steps but the pool holds {available} marks")]
    PlanTooLong { requested: u64, available: u64 },

    #[error("trace is empty")]
    EmptyTrace,

    #[error("burn-in {burn_in} discards every checkpoint (last is n = {last})")]
    BurnInTooLate { burn_in: u64, last: u64 },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("missing artifact: {0}")]
    MissingArtifact(String),

    #[error("malformed artifact {path}: {message}")]
    MalformedArtifact { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: &str, message: impl Into<String>) -> Self {
        Error::Config { field: field.to_string(), message: message.into() }
    }
}
