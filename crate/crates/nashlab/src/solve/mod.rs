//! Exact solutions for turn-based stochastic games.
//!
//! Backward induction for episodic games, value iteration on the
//! parity-augmented chain for discounted ones, plus best responses, duality
//! gaps, the occupancy-based gap-sum identity, and brute-force enumeration
//! oracles. These are the ground truth every learner is measured against.

mod brute;
mod discounted;
mod episodic;
pub mod export;

pub use brute::{brute_force_solve, gap_min_independent, DEFAULT_GAP_ENUM_LIMIT, DEFAULT_PAIR_LIMIT};
pub use discounted::{
    best_response_max_discounted, best_response_min_discounted, duality_gap_discounted,
    evaluate_pair_discounted, solve_discounted, DiscountedNashSolution, Parity,
};
pub use episodic::{
    best_response_max, best_response_min, duality_gap, evaluate_pair_episodic, exact_gap_sum,
    initial_value, solve_episodic,
};

/// Gaps smaller than this are treated as zero when deciding whether a gap
/// table has any positive entry (exact arithmetic would give exactly 0).
pub const GAP_ZERO_TOL: f64 = 1e-12;

/// Minimum positive sub-optimality gap, or a flag when every gap is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapMin {
    Value(f64),
    AllZero,
}

impl GapMin {
    pub fn value(&self) -> Option<f64> {
        match self {
            GapMin::Value(v) => Some(*v),
            GapMin::AllZero => None,
        }
    }

    pub(crate) fn from_scan(min_positive: Option<f64>) -> Self {
        match min_positive {
            Some(v) => GapMin::Value(v),
            None => GapMin::AllZero,
        }
    }
}

/// Deterministic per-step policies for both players.
///
/// `pi[i][s]` is the max-player's action at the i-th max-owned step (0-based
/// steps 0, 2, 4, ...); `mu[i][s]` the min-player's at steps 1, 3, 5, ...
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolicyPair {
    pub pi: Vec<Vec<usize>>,
    pub mu: Vec<Vec<usize>>,
}

impl PolicyPair {
    pub fn action_at(&self, step: usize, state: usize) -> usize {
        if step % 2 == 0 {
            self.pi[step / 2][state]
        } else {
            self.mu[step / 2][state]
        }
    }
}

/// Exact Nash solution of an episodic game.
#[derive(Debug, Clone)]
pub struct NashSolution {
    /// `vstar[h][s]` for h in 0..=2H; the last row is identically zero.
    pub vstar: Vec<Vec<f64>>,
    /// `qstar[h][s][a]`, action range following step parity.
    pub qstar: Vec<Vec<Vec<f64>>>,
    pub pi_star: Vec<Vec<usize>>,
    pub mu_star: Vec<Vec<usize>>,
    /// `|vstar - qstar|` per entry.
    pub gap_plus: Vec<Vec<Vec<f64>>>,
    pub gap_plus_min: GapMin,
}

impl NashSolution {
    pub fn nash_pair(&self) -> PolicyPair {
        PolicyPair {
            pi: self.pi_star.clone(),
            mu: self.mu_star.clone(),
        }
    }
}

/// Lowest-index argmax over a slice (ties break toward index 0).
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Lowest-index argmin over a slice (ties break toward index 0).
pub(crate) fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}
