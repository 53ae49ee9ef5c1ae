//! Optimistic Nash Q-learning for tabular games.
//!
//! Two learners live here: the episodic one keeps per-step upper (`qbar`) and
//! lower (`qlow`) confidence tables around the Nash Q-function and lets the
//! max-player act greedily on the upper envelope while the min-player acts on
//! the lower one; the discounted one additionally maintains monotone envelopes
//! (`qhat` nonincreasing, `qcheck` nondecreasing) that feed the value targets.

mod discounted;
mod episodic;

pub use discounted::{
    effective_horizon, run_nashq_discounted, DiscountedLearnerState, DiscountedStepHook,
    NoopStepHook,
};
pub use episodic::{
    extract_greedy_pair, learning_rate, run_nashq_episodic, EpisodeHook, EpisodeRecord,
    EpisodicLearnerState, NoopHook, StepRecord,
};
