//! Episodic optimistic Nash Q-learning.
//!
//! Per visited (step, state, action): with t the updated visit count,
//! learning rate `alpha_t = (2H+1)/(2H+t)` and bonus
//! `beta_t = c * sqrt((2H)^3 * iota / t)`,
//!
//! ```text
//! qbar <- (1-alpha_t) qbar + alpha_t [r + vbar(next) + beta_t]
//! qlow <- (1-alpha_t) qlow + alpha_t [r + vlow(next) - beta_t]
//! vbar(s) <- qbar(s, a),  vlow(s) <- qlow(s, a)
//! ```
//!
//! where `iota = ln(S * (A1+A2) * T^2)` and `T = 2H * K`. The upper tables
//! start at 2H, the lower at 0, and no clipping is applied to either.

use crate::error::LearnerError;
use crate::game::{EpisodicGameSpec, InitialState, Player};
use crate::rng::DeterministicRng;
use crate::solve::{argmax, argmin, PolicyPair};

#[derive(Debug, Clone)]
pub struct EpisodicLearnerState {
    pub qbar: Vec<Vec<Vec<f64>>>,
    pub qlow: Vec<Vec<Vec<f64>>>,
    /// `vbar[h][s]` for h in 0..=2H; the row beyond the horizon stays zero.
    pub vbar: Vec<Vec<f64>>,
    pub vlow: Vec<Vec<f64>>,
    pub counts: Vec<Vec<Vec<u64>>>,
    pub bonus_scale: f64,
    pub iota: f64,
    pub steps_executed: u64,
}

impl EpisodicLearnerState {
    fn new(spec: &EpisodicGameSpec, bonus_scale: f64, iota: f64) -> Self {
        let steps = spec.num_steps();
        let optimistic = steps as f64;
        let shape =
            |h: usize| -> usize { spec.actions_at(h) };
        let mut qbar = Vec::with_capacity(steps);
        let mut qlow = Vec::with_capacity(steps);
        let mut counts = Vec::with_capacity(steps);
        for h in 0..steps {
            qbar.push(vec![vec![optimistic; shape(h)]; spec.num_states]);
            qlow.push(vec![vec![0.0; shape(h)]; spec.num_states]);
            counts.push(vec![vec![0u64; shape(h)]; spec.num_states]);
        }
        // Value tables carry the same optimistic/pessimistic init as Q until
        // the first visit assigns them; beyond the horizon they are zero.
        let mut vbar = vec![vec![optimistic; spec.num_states]; steps + 1];
        vbar[steps] = vec![0.0; spec.num_states];
        let vlow = vec![vec![0.0; spec.num_states]; steps + 1];
        EpisodicLearnerState {
            qbar,
            qlow,
            vbar,
            vlow,
            counts,
            bonus_scale,
            iota,
            steps_executed: 0,
        }
    }

    pub fn num_steps(&self) -> usize {
        self.qbar.len()
    }

    pub fn total_visits(&self) -> u64 {
        self.counts.iter().flatten().flatten().sum()
    }
}

/// One executed step: the played (state, action) and the upper-lower envelope
/// difference `(qbar - qlow)(s, a)` read before the update.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub step: usize,
    pub state: usize,
    pub action: usize,
    pub envelope_gap: f64,
}

/// Everything one episode produced: the deterministic pair that was greedy at
/// the episode's start (and therefore played throughout it), plus the steps.
#[derive(Debug, Clone)]
pub struct EpisodeRecord {
    pub start_pair: PolicyPair,
    pub steps: Vec<StepRecord>,
}

pub trait EpisodeHook {
    /// Called once with the fresh state before any episode runs.
    fn before_run(&mut self, _state: &EpisodicLearnerState) {}
    /// Called after each episode (k is 1-based) with a read-only state view.
    fn after_episode(&mut self, k: u64, state: &EpisodicLearnerState, episode: &EpisodeRecord);
}

/// No-op hook for runs that only need the final state.
pub struct NoopHook;

impl EpisodeHook for NoopHook {
    fn after_episode(&mut self, _: u64, _: &EpisodicLearnerState, _: &EpisodeRecord) {}
}

pub fn learning_rate(num_steps: usize, t: u64) -> f64 {
    let two_h = num_steps as f64;
    (two_h + 1.0) / (two_h + t as f64)
}

/// The deterministic pair that greedy action selection induces: argmax of
/// `qbar` at max-owned steps, argmin of `qlow` at min-owned steps, ties
/// toward the lowest index.
pub fn extract_greedy_pair(state: &EpisodicLearnerState) -> PolicyPair {
    let steps = state.num_steps();
    let num_states = state.qbar[0].len();
    let half = steps / 2;
    let mut pi = vec![vec![0usize; num_states]; half];
    let mut mu = vec![vec![0usize; num_states]; half];
    for h in 0..steps {
        for s in 0..num_states {
            match Player::at_step(h) {
                Player::Max => pi[h / 2][s] = argmax(&state.qbar[h][s]),
                Player::Min => mu[h / 2][s] = argmin(&state.qlow[h][s]),
            }
        }
    }
    PolicyPair { pi, mu }
}

/// Run K episodes of optimistic Nash Q-learning. Identical inputs produce a
/// bit-identical state and hook stream.
pub fn run_nashq_episodic(
    spec: &EpisodicGameSpec,
    episodes: u64,
    bonus_scale: f64,
    seed: u64,
    hook: &mut dyn EpisodeHook,
) -> Result<EpisodicLearnerState, LearnerError> {
    if !(bonus_scale >= 0.0) {
        return Err(LearnerError::BadBonusScale(bonus_scale));
    }
    let steps = spec.num_steps() as u64;
    let total_steps = steps
        .checked_mul(episodes)
        .ok_or(LearnerError::StepCountOverflow {
            episodes,
            steps_per_episode: steps,
        })?;
    let a_total = (spec.actions_max + spec.actions_min) as f64;
    let t = total_steps as f64;
    let iota = (spec.num_states as f64 * a_total * t * t).ln();
    let two_h = spec.num_steps() as f64;
    let bonus_base = bonus_scale * (two_h.powi(3) * iota).sqrt();

    let mut state = EpisodicLearnerState::new(spec, bonus_scale, iota);
    let mut rng = DeterministicRng::seeded(seed);
    hook.before_run(&state);
    for k in 1..=episodes {
        let start_pair = extract_greedy_pair(&state);
        let mut s = match &spec.initial_state {
            InitialState::Fixed(s0) => *s0,
            InitialState::Distribution(d) => rng.sample_row(d),
        };
        let mut records = Vec::with_capacity(spec.num_steps());
        for h in 0..spec.num_steps() {
            let a = match Player::at_step(h) {
                Player::Max => argmax(&state.qbar[h][s]),
                Player::Min => argmin(&state.qlow[h][s]),
            };
            records.push(StepRecord {
                step: h,
                state: s,
                action: a,
                envelope_gap: state.qbar[h][s][a] - state.qlow[h][s][a],
            });
            let s_next = rng.sample_row(&spec.transitions[h][s][a]);
            state.counts[h][s][a] += 1;
            state.steps_executed += 1;
            let t_visit = state.counts[h][s][a];
            let alpha = learning_rate(spec.num_steps(), t_visit);
            let beta = bonus_base / (t_visit as f64).sqrt();
            let r = spec.rewards[h][s][a];
            state.qbar[h][s][a] =
                (1.0 - alpha) * state.qbar[h][s][a] + alpha * (r + state.vbar[h + 1][s_next] + beta);
            state.qlow[h][s][a] =
                (1.0 - alpha) * state.qlow[h][s][a] + alpha * (r + state.vlow[h + 1][s_next] - beta);
            state.vbar[h][s] = state.qbar[h][s][a];
            state.vlow[h][s] = state.qlow[h][s][a];
            s = s_next;
        }
        hook.after_episode(k, &state, &EpisodeRecord { start_pair, steps: records });
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures;
    use crate::solve::solve_episodic;

    #[test]
    fn learning_rate_examples() {
        // H = 1 so an episode has 2 steps
        assert_eq!(learning_rate(2, 1), 1.0);
        assert_eq!(learning_rate(2, 3), 0.6);
    }

    #[test]
    fn first_visit_overwrites_optimistic_init() {
        // alpha_1 = 1 when H = 1, so the 2H init contributes nothing after
        // the first visit: qbar = r + vbar(next) + beta exactly.
        let spec = fixtures::g_one();
        let c = 1.5;
        let state = run_nashq_episodic(&spec, 1, c, 3, &mut NoopHook).unwrap();
        let iota = state.iota;
        let beta1 = c * (8.0f64 * iota).sqrt();
        // step 1 sees the step-2 optimistic init 2H = 2
        assert_eq!(state.qbar[0][0][0], 1.0 + 2.0 + beta1);
        // last step backs up the zero terminal value
        assert_eq!(state.qbar[1][0][0], 0.0 + 0.0 + beta1);
    }

    #[test]
    fn g_one_single_episode_trace_with_zero_bonus() {
        let spec = fixtures::g_one();
        let state = run_nashq_episodic(&spec, 1, 0.0, 42, &mut NoopHook).unwrap();
        // all-2H init ties at step 1, so a0 is played and updated
        assert_eq!(state.counts[0][0][0], 1);
        assert_eq!(state.counts[0][0][1], 0);
        // qlow_1(s0, a0) = r + vlow_2 - 0 = 1
        assert_eq!(state.qlow[0][0][0], 1.0);
        // qbar_1(s0, a0) = r + vbar_2 = 1 + 2
        assert_eq!(state.qbar[0][0][0], 3.0);
        // step 2 plays b0 and backs up the terminal zero
        assert_eq!(state.counts[1][0][0], 1);
        assert_eq!(state.qlow[1][0][0], 0.0);
        assert_eq!(state.qbar[1][0][0], 0.0);
        assert_eq!(state.steps_executed, 2);
    }

    #[test]
    fn fresh_state_greedy_pair_is_all_lowest_index() {
        let spec = fixtures::g_one();
        let state = EpisodicLearnerState::new(&spec, 1.0, 1.0);
        let pair = extract_greedy_pair(&state);
        assert_eq!(pair.pi, vec![vec![0]]);
        assert_eq!(pair.mu, vec![vec![0]]);
    }

    #[test]
    fn bumped_entry_moves_the_argmax() {
        let spec = fixtures::g_one();
        let mut state = EpisodicLearnerState::new(&spec, 1.0, 1.0);
        state.qbar[0][0][1] = 10.0;
        assert_eq!(extract_greedy_pair(&state).pi, vec![vec![1]]);
    }

    #[test]
    fn long_run_converges_to_nash_pair_on_g_one() {
        let spec = fixtures::g_one();
        let state = run_nashq_episodic(&spec, 10_000, 2.0, 7, &mut NoopHook).unwrap();
        let pair = extract_greedy_pair(&state);
        let sol = solve_episodic(&spec);
        assert_eq!(pair.pi, sol.pi_star);
        assert_eq!(pair.mu, sol.mu_star);
    }

    #[test]
    fn count_conservation() {
        struct CountCheck;
        impl EpisodeHook for CountCheck {
            fn after_episode(&mut self, k: u64, state: &EpisodicLearnerState, _: &EpisodeRecord) {
                assert_eq!(state.total_visits(), state.steps_executed);
                assert_eq!(state.steps_executed, k * state.num_steps() as u64);
            }
        }
        run_nashq_episodic(&fixtures::g_one(), 50, 2.0, 9, &mut CountCheck).unwrap();
    }

    #[test]
    fn determinism_by_inputs() {
        let spec = crate::game::generate_random_episodic(3, 2, 2, 2, 7).unwrap();
        let a = run_nashq_episodic(&spec, 200, 2.0, 5, &mut NoopHook).unwrap();
        let b = run_nashq_episodic(&spec, 200, 2.0, 5, &mut NoopHook).unwrap();
        assert_eq!(a.qbar, b.qbar);
        assert_eq!(a.qlow, b.qlow);
        assert_eq!(a.counts, b.counts);
    }

    #[test]
    fn overflowing_step_count_rejected() {
        let spec = fixtures::g_one();
        match run_nashq_episodic(&spec, u64::MAX / 2 + 1, 2.0, 1, &mut NoopHook) {
            Err(LearnerError::StepCountOverflow { .. }) => {}
            other => panic!("expected overflow rejection, got {other:?}"),
        }
    }
}
