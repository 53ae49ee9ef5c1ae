//! Least-squares value iteration for linear turn-based games.
//!
//! Each episode runs a full backward pass: per step, ridge weights are fit
//! against targets `r + value(next)` recomputed over the whole history with
//! the current episode's value function, then Q estimates are formed as
//!
//! ```text
//! qbar(s,a) = min(2H, phi.wbar + beta * width(s,a))
//! qlow(s,a) = max(0,  phi.wlow - beta * width(s,a))
//! ```
//!
//! with `width = sqrt(phi^T Lambda^{-1} phi)` and `beta = c_beta d H sqrt(iota)`,
//! `iota = ln(4 d K H / p)`. The forward pass plays argmax of `qbar` at
//! max-owned steps and (centralized) argmin of `qlow` at min-owned steps.
//! The cumulative played width satisfies the elliptical potential bound
//! `sum_{i<=k} width_i^2 <= 2 d ln(1+k)` per step with `lambda = 1`; the run
//! asserts it at every episode.

use super::opponent::Opponent;
use super::ridge::RidgeAccumulator;
use super::spd::{assert_residual, CholeskyFactor};
use crate::error::LearnerError;
use crate::game::{dot, InitialState, LinearGameSpec, Player};
use crate::rng::DeterministicRng;
use crate::solve::{argmax, argmin, PolicyPair};

pub const DEFAULT_LAMBDA: f64 = 1.0;
pub const DEFAULT_C_BETA: f64 = 160.0;

/// `p = 1 / (4 H^2 K (K+1))`.
pub fn default_failure_prob(half_horizon: usize, episodes: u64) -> f64 {
    let h = half_horizon as f64;
    let k = episodes as f64;
    1.0 / (4.0 * h * h * k * (k + 1.0))
}

#[derive(Debug, Clone)]
pub struct LsviParams {
    pub episodes: u64,
    pub bonus_multiplier: f64,
    /// Failure probability p; `None` picks the default above.
    pub failure_prob: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct LsviState {
    pub ridge: Vec<RidgeAccumulator>,
    pub beta: f64,
    pub iota: f64,
    pub failure_prob: f64,
    /// Q tables of the current episode's backward pass, per (step, state, action).
    pub qbar: Vec<Vec<Vec<f64>>>,
    /// Lower tables; absent in the independent setting.
    pub qlow: Option<Vec<Vec<Vec<f64>>>>,
    pub width: Vec<Vec<Vec<f64>>>,
    pub wbar: Vec<Vec<f64>>,
    pub wlow: Option<Vec<Vec<f64>>>,
    /// Running `sum width^2` of played features per step.
    pub elliptical: Vec<f64>,
    pub episode: u64,
}

#[derive(Debug, Clone)]
pub struct LsviStepRecord {
    pub step: usize,
    pub state: usize,
    pub action: usize,
    /// `qbar` at the played entry.
    pub upper_value: f64,
    /// `(qbar - qlow)` at the played entry; `None` in the independent setting.
    pub envelope_gap: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct LsviEpisodeRecord {
    /// The pair in force this episode: the greedy tables' pair (centralized)
    /// or greedy max side with the opponent's committed policy (independent).
    pub pair: PolicyPair,
    pub steps: Vec<LsviStepRecord>,
}

pub trait LsviHook {
    fn after_episode(&mut self, k: u64, state: &LsviState, episode: &LsviEpisodeRecord);
}

pub struct NoopLsviHook;

impl LsviHook for NoopLsviHook {
    fn after_episode(&mut self, _: u64, _: &LsviState, _: &LsviEpisodeRecord) {}
}

fn check_dims(spec: &LinearGameSpec) -> Result<(), LearnerError> {
    for h in 0..spec.num_steps() {
        for s in 0..spec.num_states {
            for a in 0..spec.actions_at(h) {
                let len = spec.features[h][s][a].len();
                if len != spec.dim {
                    return Err(LearnerError::DimensionMismatch {
                        expected: spec.dim,
                        found: len,
                    });
                }
            }
        }
    }
    Ok(())
}

fn new_state(spec: &LinearGameSpec, params: &LsviParams, centralized: bool) -> LsviState {
    let steps = spec.num_steps();
    let d = spec.dim;
    let h = spec.half_horizon as f64;
    let k = params.episodes as f64;
    let p = params
        .failure_prob
        .unwrap_or_else(|| default_failure_prob(spec.half_horizon, params.episodes));
    let iota = (4.0 * d as f64 * k * h / p).ln();
    let beta = params.bonus_multiplier * d as f64 * h * iota.sqrt();
    let table = |_: usize| -> Vec<Vec<Vec<f64>>> {
        (0..steps)
            .map(|hh| vec![vec![0.0; spec.actions_at(hh)]; spec.num_states])
            .collect()
    };
    LsviState {
        ridge: (0..steps).map(|_| RidgeAccumulator::new(d, DEFAULT_LAMBDA)).collect(),
        beta,
        iota,
        failure_prob: p,
        qbar: table(0),
        qlow: centralized.then(|| table(0)),
        width: table(0),
        wbar: vec![vec![0.0; d]; steps],
        wlow: centralized.then(|| vec![vec![0.0; d]; steps]),
        elliptical: vec![0.0; steps],
        episode: 0,
    }
}

/// Value of each state under the play rule at step `h`, read off the current
/// tables: max-owned steps argmax `qbar`; min-owned steps argmin `qlow` when
/// present, otherwise (independent: the opponent's action is unknowable at
/// regression time) the upper envelope max over the min-player's actions.
fn value_tables_for_step(
    spec: &LinearGameSpec,
    state: &LsviState,
    h: usize,
) -> (Vec<f64>, Option<Vec<f64>>) {
    let mut vbar = vec![0.0; spec.num_states];
    let mut vlow = state.qlow.as_ref().map(|_| vec![0.0; spec.num_states]);
    for s in 0..spec.num_states {
        match (Player::at_step(h), &state.qlow) {
            (Player::Max, qlow) => {
                let a = argmax(&state.qbar[h][s]);
                vbar[s] = state.qbar[h][s][a];
                if let (Some(q), Some(v)) = (qlow, vlow.as_mut()) {
                    v[s] = q[h][s][a];
                }
            }
            (Player::Min, Some(qlow)) => {
                let a = argmin(&qlow[h][s]);
                vbar[s] = state.qbar[h][s][a];
                vlow.as_mut().unwrap()[s] = qlow[h][s][a];
            }
            (Player::Min, None) => {
                let a = argmax(&state.qbar[h][s]);
                vbar[s] = state.qbar[h][s][a];
            }
        }
    }
    (vbar, vlow)
}

fn backward_pass(spec: &LinearGameSpec, state: &mut LsviState) -> Result<(), LearnerError> {
    let steps = spec.num_steps();
    let mut vbar_next = vec![0.0; spec.num_states];
    let mut vlow_next = state.qlow.as_ref().map(|_| vec![0.0; spec.num_states]);
    for h in (0..steps).rev() {
        let factor: CholeskyFactor = state.ridge[h].factor().map_err(LearnerError::Spd)?;
        state.wbar[h] = state.ridge[h].regression_weights(&factor, &vbar_next);
        if let (Some(wlow), Some(vlow)) = (state.wlow.as_mut(), vlow_next.as_ref()) {
            wlow[h] = state.ridge[h].regression_weights(&factor, vlow);
        }
        let cap = steps as f64;
        for s in 0..spec.num_states {
            for a in 0..spec.actions_at(h) {
                let phi = &spec.features[h][s][a];
                let solved = factor.solve(phi);
                assert_residual(&state.ridge[h].gram, &solved, phi);
                let width = dot(phi, &solved).max(0.0).sqrt();
                state.width[h][s][a] = width;
                state.qbar[h][s][a] = (dot(phi, &state.wbar[h]) + state.beta * width).min(cap);
                if let Some(qlow) = state.qlow.as_mut() {
                    let low = dot(phi, &state.wlow.as_ref().unwrap()[h]) - state.beta * width;
                    qlow[h][s][a] = low.max(0.0);
                }
            }
        }
        let (vbar, vlow) = value_tables_for_step(spec, state, h);
        vbar_next = vbar;
        vlow_next = vlow;
    }
    Ok(())
}

/// Full policy pair induced by the current tables (independent runs override
/// the min side with the opponent's commitment).
fn greedy_pair(spec: &LinearGameSpec, state: &LsviState) -> PolicyPair {
    let half = spec.half_horizon;
    let mut pi = vec![vec![0usize; spec.num_states]; half];
    let mut mu = vec![vec![0usize; spec.num_states]; half];
    for h in 0..spec.num_steps() {
        for s in 0..spec.num_states {
            match Player::at_step(h) {
                Player::Max => pi[h / 2][s] = argmax(&state.qbar[h][s]),
                Player::Min => {
                    mu[h / 2][s] = match &state.qlow {
                        Some(qlow) => argmin(&qlow[h][s]),
                        None => 0,
                    }
                }
            }
        }
    }
    PolicyPair { pi, mu }
}

fn forward_pass(
    spec: &LinearGameSpec,
    state: &mut LsviState,
    pair: &PolicyPair,
    rng: &mut DeterministicRng,
    k: u64,
) -> Result<Vec<LsviStepRecord>, LearnerError> {
    let mut s = match &spec.initial_state {
        InitialState::Fixed(s0) => *s0,
        InitialState::Distribution(d) => rng.sample_row(d),
    };
    let mut records = Vec::with_capacity(spec.num_steps());
    for h in 0..spec.num_steps() {
        let a = pair.action_at(h, s);
        if a >= spec.actions_at(h) {
            return Err(LearnerError::OpponentActionOutOfRange {
                action: a,
                bound: spec.actions_at(h),
            });
        }
        let width = state.width[h][s][a];
        state.elliptical[h] += width * width;
        let bound = 2.0 * spec.dim as f64 * (1.0 + k as f64).ln();
        assert!(
            state.elliptical[h] <= bound + 1e-9,
            "elliptical potential {} exceeds 2 d ln(1+k) = {bound} at step {h}, episode {k}",
            state.elliptical[h]
        );
        records.push(LsviStepRecord {
            step: h,
            state: s,
            action: a,
            upper_value: state.qbar[h][s][a],
            envelope_gap: state.qlow.as_ref().map(|q| state.qbar[h][s][a] - q[h][s][a]),
        });
        let reward = spec.reconstruct_reward(h, s, a);
        let row = spec.reconstruct_transition_row(h, s, a);
        let s_next = rng.sample_row(&row);
        state.ridge[h].push(spec.features[h][s][a].clone(), reward, s_next);
        s = s_next;
    }
    Ok(records)
}

/// Centralized self-play: one controller learns both sides.
pub fn run_lsvi_centralized(
    spec: &LinearGameSpec,
    params: &LsviParams,
    hook: &mut dyn LsviHook,
) -> Result<LsviState, LearnerError> {
    check_dims(spec)?;
    let mut state = new_state(spec, params, true);
    let mut rng = DeterministicRng::seeded(params.seed);
    for k in 1..=params.episodes {
        state.episode = k;
        backward_pass(spec, &mut state)?;
        let pair = greedy_pair(spec, &state);
        let steps = forward_pass(spec, &mut state, &pair, &mut rng, k)?;
        hook.after_episode(k, &state, &LsviEpisodeRecord { pair, steps });
    }
    Ok(state)
}

/// Independent setting: only the max-player learns; min-player actions come
/// from the opponent, which commits to a pure policy per episode.
pub fn run_lsvi_independent(
    spec: &LinearGameSpec,
    params: &LsviParams,
    opponent: &mut dyn Opponent,
    hook: &mut dyn LsviHook,
) -> Result<LsviState, LearnerError> {
    check_dims(spec)?;
    let mut state = new_state(spec, params, false);
    let mut rng = DeterministicRng::seeded(params.seed);
    for k in 1..=params.episodes {
        state.episode = k;
        backward_pass(spec, &mut state)?;
        let mut pair = greedy_pair(spec, &state);
        let mu = opponent.episode_policy(k, &pair.pi);
        for row in &mu {
            for &a in row {
                if a >= spec.actions_min {
                    return Err(LearnerError::OpponentActionOutOfRange {
                        action: a,
                        bound: spec.actions_min,
                    });
                }
            }
        }
        pair.mu = mu;
        let steps = forward_pass(spec, &mut state, &pair, &mut rng, k)?;
        hook.after_episode(k, &state, &LsviEpisodeRecord { pair, steps });
    }
    Ok(state)
}
