//! Least-squares value iteration with linear function approximation.

mod lsvi;
mod opponent;
mod ridge;
mod spd;

pub use lsvi::{
    default_failure_prob, run_lsvi_centralized, run_lsvi_independent, LsviEpisodeRecord, LsviHook,
    LsviParams, LsviState, LsviStepRecord, NoopLsviHook, DEFAULT_C_BETA, DEFAULT_LAMBDA,
};
pub use opponent::{BestResponseOracle, FixedPure, Opponent, SeededRandomStationary};
pub use ridge::{HistoryEntry, RidgeAccumulator};
pub use spd::{spd_solve, ucb_width, CholeskyFactor};
