//! Discounted infinite-horizon optimistic Nash Q-learning.
//!
//! On top of the upper/lower tables of the episodic learner, this one keeps
//! monotone envelopes: after every update `qhat <- min(qhat, qbar)` and
//! `qcheck <- max(qcheck, qlow)`, and the value targets read `vhat`/`vcheck`
//! which track the envelopes at the last played action. The learning rate is
//! `alpha_k = (H+1)/(H+k)` with the effective horizon
//! `H = ln(2/((1-gamma) g)) / ln(1/gamma)` derived from a positive lower
//! bound `g` on the minimum gap, and the bonus is
//! `b_k = c2/(1-gamma) * sqrt(H * iota(k) / k)` with
//! `iota(k) = ln(S * (A1+A2) * T * (k+1) * (k+2))`.

use crate::error::LearnerError;
use crate::game::{DiscountedGameSpec, Player};
use crate::rng::DeterministicRng;
use crate::solve::{argmax, argmin};

/// `H = ln(2 / ((1-gamma) * gap_lower_bound)) / ln(1/gamma)`.
pub fn effective_horizon(discount: f64, gap_lower_bound: f64) -> f64 {
    (2.0 / ((1.0 - discount) * gap_lower_bound)).ln() / (1.0 / discount).ln()
}

#[derive(Debug, Clone)]
pub struct DiscountedLearnerState {
    /// Tables over `[S][A1+A2]`: max-player action columns first.
    pub qbar: Vec<Vec<f64>>,
    pub qlow: Vec<Vec<f64>>,
    /// Pointwise nonincreasing envelope of `qbar`.
    pub qhat: Vec<Vec<f64>>,
    /// Pointwise nondecreasing envelope of `qlow`.
    pub qcheck: Vec<Vec<f64>>,
    pub vhat: Vec<f64>,
    pub vcheck: Vec<f64>,
    pub counts: Vec<Vec<u64>>,
    pub effective_horizon: f64,
    pub c2: f64,
    pub steps_executed: u64,
    /// Updates where an envelope moved the wrong way; stays 0 by construction
    /// and is re-checked at runtime.
    pub monotonicity_violations: u64,
}

impl DiscountedLearnerState {
    fn new(spec: &DiscountedGameSpec, horizon: f64, c2: f64) -> Self {
        let cap = 1.0 / (1.0 - spec.discount);
        let acts = spec.num_actions();
        DiscountedLearnerState {
            qbar: vec![vec![cap; acts]; spec.num_states],
            qlow: vec![vec![0.0; acts]; spec.num_states],
            qhat: vec![vec![cap; acts]; spec.num_states],
            qcheck: vec![vec![0.0; acts]; spec.num_states],
            vhat: vec![cap; spec.num_states],
            vcheck: vec![0.0; spec.num_states],
            counts: vec![vec![0u64; acts]; spec.num_states],
            effective_horizon: horizon,
            c2,
            steps_executed: 0,
            monotonicity_violations: 0,
        }
    }

    /// Stationary greedy pair: argmax of `qbar` over the max-player's columns,
    /// argmin of `qlow` over the min-player's.
    pub fn greedy_pair(&self, actions_max: usize) -> (Vec<usize>, Vec<usize>) {
        let pi = self.qbar.iter().map(|row| argmax(&row[..actions_max])).collect();
        let mu = self.qlow.iter().map(|row| argmin(&row[actions_max..])).collect();
        (pi, mu)
    }
}

pub trait DiscountedStepHook {
    fn before_run(&mut self, _state: &DiscountedLearnerState) {}
    /// Called every step (t 1-based) after action selection but before the
    /// update, so the view is exactly what the step's decision saw.
    fn at_step(&mut self, t: u64, state_index: usize, action_column: usize, state: &DiscountedLearnerState);
}

pub struct NoopStepHook;

impl DiscountedStepHook for NoopStepHook {
    fn at_step(&mut self, _: u64, _: usize, _: usize, _: &DiscountedLearnerState) {}
}

/// Run T steps of the discounted learner. Odd (1-based) steps belong to the
/// max-player, even ones to the min-player.
pub fn run_nashq_discounted(
    spec: &DiscountedGameSpec,
    total_steps: u64,
    c2: f64,
    gap_lower_bound: f64,
    seed: u64,
    hook: &mut dyn DiscountedStepHook,
) -> Result<DiscountedLearnerState, LearnerError> {
    if !(gap_lower_bound > 0.0) {
        return Err(LearnerError::BadGapLowerBound(gap_lower_bound));
    }
    let gamma = spec.discount;
    let horizon = effective_horizon(gamma, gap_lower_bound);
    let mut state = DiscountedLearnerState::new(spec, horizon, c2);
    let mut rng = DeterministicRng::seeded(seed);
    let a_total = spec.num_actions() as f64;
    let sa_t = spec.num_states as f64 * a_total * total_steps as f64;
    let bonus_scale = c2 / (1.0 - gamma);
    let mut s = spec.initial_state;
    hook.before_run(&state);
    for t in 1..=total_steps {
        let player = if t % 2 == 1 { Player::Max } else { Player::Min };
        let (local, col) = match player {
            Player::Max => {
                let a = argmax(&state.qbar[s][..spec.actions_max]);
                (a, a)
            }
            Player::Min => {
                let a = argmin(&state.qlow[s][spec.actions_max..]);
                (a, spec.actions_max + a)
            }
        };
        hook.at_step(t, s, col, &state);
        let s_next = rng.sample_row(spec.transition_row(s, player, local));
        state.counts[s][col] += 1;
        state.steps_executed += 1;
        let k = state.counts[s][col];
        let alpha = (horizon + 1.0) / (horizon + k as f64);
        let iota_k = (sa_t * (k + 1) as f64 * (k + 2) as f64).ln();
        let bonus = bonus_scale * (horizon * iota_k / k as f64).sqrt();
        let r = spec.reward(s, player, local);
        state.qbar[s][col] =
            (1.0 - alpha) * state.qbar[s][col] + alpha * (r + gamma * state.vhat[s_next] + bonus);
        state.qlow[s][col] =
            (1.0 - alpha) * state.qlow[s][col] + alpha * (r + gamma * state.vcheck[s_next] - bonus);
        let old_hat = state.qhat[s][col];
        let old_check = state.qcheck[s][col];
        state.qhat[s][col] = old_hat.min(state.qbar[s][col]);
        state.qcheck[s][col] = old_check.max(state.qlow[s][col]);
        if state.qhat[s][col] > old_hat || state.qcheck[s][col] < old_check {
            state.monotonicity_violations += 1;
        }
        state.vhat[s] = state.qhat[s][col];
        state.vcheck[s] = state.qcheck[s][col];
        s = s_next;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures;
    use crate::solve::solve_discounted;

    #[test]
    fn effective_horizon_example() {
        assert!((effective_horizon(0.5, 1.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn envelopes_are_monotone_along_any_run() {
        struct MonotoneCheck {
            last_hat: Option<Vec<Vec<f64>>>,
            last_check: Option<Vec<Vec<f64>>>,
        }
        impl DiscountedStepHook for MonotoneCheck {
            fn at_step(&mut self, _: u64, _: usize, _: usize, state: &DiscountedLearnerState) {
                if let (Some(hat), Some(check)) = (&self.last_hat, &self.last_check) {
                    for (s, row) in state.qhat.iter().enumerate() {
                        for (a, &v) in row.iter().enumerate() {
                            assert!(v <= hat[s][a], "qhat increased at ({s},{a})");
                            assert!(state.qcheck[s][a] >= check[s][a], "qcheck decreased at ({s},{a})");
                        }
                    }
                }
                self.last_hat = Some(state.qhat.clone());
                self.last_check = Some(state.qcheck.clone());
            }
        }
        let mut hook = MonotoneCheck { last_hat: None, last_check: None };
        let state =
            run_nashq_discounted(&fixtures::g_disc(), 2_000, 4.0 * 2f64.sqrt(), 1.0, 7, &mut hook)
                .unwrap();
        assert_eq!(state.monotonicity_violations, 0);
    }

    #[test]
    fn g_disc_envelopes_bracket_the_nash_q_value() {
        let spec = fixtures::g_disc();
        let sol = solve_discounted(&spec, 1e-10).unwrap();
        let q_star = sol.qstar.max_to_move[0][0]; // 4/3
        let state =
            run_nashq_discounted(&spec, 10_000, 4.0 * 2f64.sqrt(), 1.0, 7, &mut NoopStepHook)
                .unwrap();
        assert!(state.qcheck[0][0] <= q_star + 1e-9);
        assert!(state.qhat[0][0] >= q_star - 1e-9);
    }

    #[test]
    fn determinism_by_inputs() {
        let spec = fixtures::g_disc();
        let a = run_nashq_discounted(&spec, 500, 1.0, 1.0, 3, &mut NoopStepHook).unwrap();
        let b = run_nashq_discounted(&spec, 500, 1.0, 1.0, 3, &mut NoopStepHook).unwrap();
        assert_eq!(a.qbar, b.qbar);
        assert_eq!(a.qhat, b.qhat);
        assert_eq!(a.counts, b.counts);
    }

    #[test]
    fn nonpositive_gap_lower_bound_rejected() {
        match run_nashq_discounted(&fixtures::g_disc(), 10, 1.0, 0.0, 1, &mut NoopStepHook) {
            Err(LearnerError::BadGapLowerBound(_)) => {}
            other => panic!("expected rejection, got {other:?}"),
        }
    }
}
