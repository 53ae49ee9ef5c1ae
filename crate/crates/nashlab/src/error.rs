//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GameError {
    #[error("{name} must be at least 1 (got 0)")]
    ZeroCount { name: &'static str },
}

#[derive(Debug, Error)]
pub enum SpecIoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: parse error at line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: missing field `{field}` at {location}")]
    MissingField {
        path: String,
        field: String,
        location: String,
    },
    #[error("{path}: invalid value for `{field}`: {message}")]
    InvalidField {
        path: String,
        field: String,
        message: String,
    },
    #[error("{path}: unsupported format_version {found} (this build reads version {expected})")]
    VersionMismatch {
        path: String,
        found: i64,
        expected: i64,
    },
    #[error("{path}: unknown game kind `{kind}`")]
    UnknownKind { path: String, kind: String },
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("enumeration limit exceeded: {count} pure-policy combinations > limit {limit}")]
    EnumerationLimit { count: u128, limit: u128 },
    #[error("value iteration did not converge within {iterations} sweeps (tolerance {tolerance:e} too small for cap)")]
    NonConvergence { iterations: usize, tolerance: f64 },
    #[error("tolerance must be positive (got {0})")]
    BadTolerance(f64),
}

#[derive(Debug, Error)]
pub enum LearnerError {
    #[error("episode count {episodes} makes the total step count overflow (horizon {steps_per_episode})")]
    StepCountOverflow {
        episodes: u64,
        steps_per_episode: u64,
    },
    #[error("bonus scale must be positive (got {0})")]
    BadBonusScale(f64),
    #[error("gap lower bound must be positive (got {0})")]
    BadGapLowerBound(f64),
    #[error("feature dimension mismatch: spec declares d={expected}, feature has length {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("opponent returned out-of-range action {action} (min-player has {bound} actions)")]
    OpponentActionOutOfRange { action: usize, bound: usize },
    #[error("linear solve failed: {0}")]
    Spd(#[from] SpdError),
}

#[derive(Debug, Error)]
pub enum SpdError {
    #[error("matrix is not positive definite: nonpositive pivot at index {pivot}")]
    NotPositiveDefinite { pivot: usize },
    #[error("dimension mismatch: matrix is {rows}x{cols}, vector has length {len}")]
    Shape { rows: usize, cols: usize, len: usize },
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("game failed validation:\n{0}")]
    InvalidGame(String),
    #[error("cannot run: gap table is all-zero, the algorithm requires a positive gap lower bound")]
    AllZeroGap,
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    SpecIo(#[from] SpecIoError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Learner(#[from] LearnerError),
}
