//! Game specifications for two-player turn-based stochastic games.
//!
//! A game alternates turns by step parity: the max-player owns steps
//! 1, 3, 5, ... and the min-player owns steps 2, 4, 6, ... (1-based).
//! Internally steps are 0-based, so even indices belong to the max-player.
//! Both players see the same reward stream; one maximizes it, the other
//! minimizes it.

mod generate;
pub mod io;
mod lift;
mod validate;

pub use generate::generate_random_episodic;
pub use io::{read_spec, write_spec, GameSpec};
pub use lift::lift_tabular_to_linear;
pub use validate::ValidationReport;

/// Tolerance for probability rows summing to one.
pub const PROB_ROW_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Player {
    Max,
    Min,
}

impl Player {
    /// Turn owner of a 0-based step index.
    pub fn at_step(step: usize) -> Player {
        if step % 2 == 0 {
            Player::Max
        } else {
            Player::Min
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Fixed(usize),
    Distribution(Vec<f64>),
}

/// Episodic game: `2H` steps, per-step transition and reward tables.
///
/// `transitions[h][s][a]` is a probability row over successor states; at an
/// even 0-based `h` the action indexes the max-player's set (`actions_max`
/// entries), at an odd `h` the min-player's (`actions_min` entries).
/// `rewards` shares the same index shape with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodicGameSpec {
    pub half_horizon: usize,
    pub num_states: usize,
    pub actions_max: usize,
    pub actions_min: usize,
    pub transitions: Vec<Vec<Vec<Vec<f64>>>>,
    pub rewards: Vec<Vec<Vec<f64>>>,
    pub initial_state: InitialState,
}

impl EpisodicGameSpec {
    pub fn num_steps(&self) -> usize {
        2 * self.half_horizon
    }

    /// Number of legal actions at a 0-based step.
    pub fn actions_at(&self, step: usize) -> usize {
        match Player::at_step(step) {
            Player::Max => self.actions_max,
            Player::Min => self.actions_min,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        validate::validate_episodic(self)
    }
}

/// Discounted infinite-horizon game. Turn ownership is by global time-step
/// parity, so every state carries rows for both players' actions:
/// `transitions[s][a]` lists the max-player's `actions_max` rows first,
/// then the min-player's `actions_min` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscountedGameSpec {
    pub num_states: usize,
    pub actions_max: usize,
    pub actions_min: usize,
    pub transitions: Vec<Vec<Vec<f64>>>,
    pub rewards: Vec<Vec<f64>>,
    pub discount: f64,
    pub initial_state: usize,
}

impl DiscountedGameSpec {
    pub fn num_actions(&self) -> usize {
        self.actions_max + self.actions_min
    }

    /// Combined action-column index for a player's local action.
    pub fn action_column(&self, player: Player, action: usize) -> usize {
        match player {
            Player::Max => action,
            Player::Min => self.actions_max + action,
        }
    }

    pub fn transition_row(&self, state: usize, player: Player, action: usize) -> &[f64] {
        &self.transitions[state][self.action_column(player, action)]
    }

    pub fn reward(&self, state: usize, player: Player, action: usize) -> f64 {
        self.rewards[state][self.action_column(player, action)]
    }

    pub fn validate(&self) -> ValidationReport {
        validate::validate_discounted(self)
    }
}

/// Episodic game in linear form: transitions and rewards are induced by a
/// feature map, per-step measures and reward weights,
/// `P_h(s'|s,a) = <phi(h,s,a), theta_h(s')>` and `r_h(s,a) = <phi(h,s,a), mu_h>`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearGameSpec {
    pub half_horizon: usize,
    pub num_states: usize,
    pub actions_max: usize,
    pub actions_min: usize,
    pub dim: usize,
    /// `features[h][s][a]` is a d-vector; action range follows step parity.
    pub features: Vec<Vec<Vec<Vec<f64>>>>,
    /// `measures[h][s_next]` is the d-vector measure of the successor state.
    pub measures: Vec<Vec<Vec<f64>>>,
    /// `reward_weights[h]` is the d-vector inducing step-h rewards.
    pub reward_weights: Vec<Vec<f64>>,
    pub initial_state: InitialState,
}

impl LinearGameSpec {
    pub fn num_steps(&self) -> usize {
        2 * self.half_horizon
    }

    pub fn actions_at(&self, step: usize) -> usize {
        match Player::at_step(step) {
            Player::Max => self.actions_max,
            Player::Min => self.actions_min,
        }
    }

    pub fn reconstruct_transition_row(&self, step: usize, state: usize, action: usize) -> Vec<f64> {
        let phi = &self.features[step][state][action];
        (0..self.num_states)
            .map(|s2| dot(phi, &self.measures[step][s2]))
            .collect()
    }

    pub fn reconstruct_reward(&self, step: usize, state: usize, action: usize) -> f64 {
        dot(&self.features[step][state][action], &self.reward_weights[step])
    }

    /// Materialize the induced tabular game. Exact for one-hot lifts.
    pub fn to_episodic(&self) -> EpisodicGameSpec {
        let steps = self.num_steps();
        let transitions = (0..steps)
            .map(|h| {
                (0..self.num_states)
                    .map(|s| {
                        (0..self.actions_at(h))
                            .map(|a| self.reconstruct_transition_row(h, s, a))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let rewards = (0..steps)
            .map(|h| {
                (0..self.num_states)
                    .map(|s| {
                        (0..self.actions_at(h))
                            .map(|a| self.reconstruct_reward(h, s, a))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        EpisodicGameSpec {
            half_horizon: self.half_horizon,
            num_states: self.num_states,
            actions_max: self.actions_max,
            actions_min: self.actions_min,
            transitions,
            rewards,
            initial_state: self.initial_state.clone(),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        validate::validate_linear(self)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Hand-built reference games used throughout the test suites.
pub mod fixtures {
    use super::*;

    /// One state, two actions per player, one round. The max-player's a0 pays
    /// 1 against a1's 0.25; the min-player's b0 pays 0 against b1's 0.5.
    /// Nash pair (a0, b0) with value 1.
    pub fn g_one() -> EpisodicGameSpec {
        EpisodicGameSpec {
            half_horizon: 1,
            num_states: 1,
            actions_max: 2,
            actions_min: 2,
            transitions: vec![
                vec![vec![vec![1.0], vec![1.0]]],
                vec![vec![vec![1.0], vec![1.0]]],
            ],
            rewards: vec![vec![vec![1.0, 0.25]], vec![vec![0.0, 0.5]]],
            initial_state: InitialState::Fixed(0),
        }
    }

    /// One-state discounted game with gamma = 1/2: the max-player's a0 pays 1,
    /// a1 pays 0, the min-player's only action pays 0. The max-to-move value
    /// is 4/3 and the minimum positive gap is 1.
    pub fn g_disc() -> DiscountedGameSpec {
        DiscountedGameSpec {
            num_states: 1,
            actions_max: 2,
            actions_min: 1,
            transitions: vec![vec![vec![1.0], vec![1.0], vec![1.0]]],
            rewards: vec![vec![1.0, 0.0, 0.0]],
            discount: 0.5,
            initial_state: 0,
        }
    }

    /// All-zero rewards and uniform transitions: every value and gap is zero.
    pub fn zero_reward(num_states: usize, a1: usize, a2: usize, half_horizon: usize) -> EpisodicGameSpec {
        let steps = 2 * half_horizon;
        let uniform = vec![1.0 / num_states as f64; num_states];
        let transitions = (0..steps)
            .map(|h| {
                let acts = if h % 2 == 0 { a1 } else { a2 };
                vec![vec![uniform.clone(); acts]; num_states]
            })
            .collect();
        let rewards = (0..steps)
            .map(|h| {
                let acts = if h % 2 == 0 { a1 } else { a2 };
                vec![vec![0.0; acts]; num_states]
            })
            .collect();
        EpisodicGameSpec {
            half_horizon,
            num_states,
            actions_max: a1,
            actions_min: a2,
            transitions,
            rewards,
            initial_state: InitialState::Fixed(0),
        }
    }
}
