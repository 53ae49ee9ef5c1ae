//! Empirical checks of the upper/lower envelope ordering around the exact
//! Nash Q-values. The ordering holds with high probability, not surely, so
//! these are measurements, never assertions.

use crate::linear::LsviState;
use crate::solve::{DiscountedNashSolution, NashSolution};
use crate::tabular::{DiscountedLearnerState, EpisodicLearnerState};

pub const CONCENTRATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default)]
pub struct ConcentrationCount {
    pub checks: u64,
    pub violations: u64,
}

impl ConcentrationCount {
    fn record(&mut self, violated: bool) {
        self.checks += 1;
        if violated {
            self.violations += 1;
        }
    }
}

/// Entries where `qlow > Q* + tol` or `qbar < Q* - tol`.
pub fn check_concentration_episodic(
    state: &EpisodicLearnerState,
    solution: &NashSolution,
    tol: f64,
) -> ConcentrationCount {
    let mut count = ConcentrationCount::default();
    for h in 0..state.num_steps() {
        for s in 0..state.qbar[h].len() {
            for a in 0..state.qbar[h][s].len() {
                let q_star = solution.qstar[h][s][a];
                count.record(
                    state.qlow[h][s][a] > q_star + tol || state.qbar[h][s][a] < q_star - tol,
                );
            }
        }
    }
    count
}

/// Discounted analogue over the monotone envelopes `qhat`/`qcheck`.
pub fn check_concentration_discounted(
    state: &DiscountedLearnerState,
    solution: &DiscountedNashSolution,
    actions_max: usize,
    tol: f64,
) -> ConcentrationCount {
    let mut count = ConcentrationCount::default();
    for (s, row) in state.qhat.iter().enumerate() {
        for (col, &hat) in row.iter().enumerate() {
            let q_star = if col < actions_max {
                solution.qstar.max_to_move[s][col]
            } else {
                solution.qstar.min_to_move[s][col - actions_max]
            };
            count.record(state.qcheck[s][col] > q_star + tol || hat < q_star - tol);
        }
    }
    count
}

/// LSVI tables against the exact tabular solution. Independent runs carry no
/// lower table, so only the upper side is checked there.
pub fn check_concentration_lsvi(state: &LsviState, solution: &NashSolution, tol: f64) -> ConcentrationCount {
    let mut count = ConcentrationCount::default();
    for h in 0..state.qbar.len() {
        for s in 0..state.qbar[h].len() {
            for a in 0..state.qbar[h][s].len() {
                let q_star = solution.qstar[h][s][a];
                let upper_bad = state.qbar[h][s][a] < q_star - tol;
                let lower_bad = state
                    .qlow
                    .as_ref()
                    .is_some_and(|q| q[h][s][a] > q_star + tol);
                count.record(upper_bad || lower_bad);
            }
        }
    }
    count
}

/// Entries where the LSVI upper table dropped below the lower one; the
/// ordering is not guaranteed by construction, only reported.
pub fn count_envelope_order_violations(state: &LsviState) -> u64 {
    let Some(qlow) = state.qlow.as_ref() else {
        return 0;
    };
    let mut violations = 0;
    for h in 0..state.qbar.len() {
        for s in 0..state.qbar[h].len() {
            for a in 0..state.qbar[h][s].len() {
                if state.qbar[h][s][a] < qlow[h][s][a] - CONCENTRATION_TOL {
                    violations += 1;
                }
            }
        }
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures;
    use crate::solve::solve_episodic;
    use crate::tabular::{run_nashq_episodic, NoopHook};

    #[test]
    fn fresh_state_never_violates() {
        // qbar = 2H bounds every value from above, qlow = 0 from below
        let spec = fixtures::g_one();
        let solution = solve_episodic(&spec);
        let state = run_nashq_episodic(&spec, 0, 2.0, 1, &mut NoopHook).unwrap();
        let count = check_concentration_episodic(&state, &solution, CONCENTRATION_TOL);
        assert_eq!(count.violations, 0);
        assert_eq!(count.checks, 4);
    }

    #[test]
    fn planted_violation_detected() {
        let spec = fixtures::g_one();
        let solution = solve_episodic(&spec);
        let mut state = run_nashq_episodic(&spec, 0, 2.0, 1, &mut NoopHook).unwrap();
        state.qbar[0][0][0] = 0.5; // below Q* = 1
        let count = check_concentration_episodic(&state, &solution, CONCENTRATION_TOL);
        assert_eq!(count.violations, 1);
    }
}
