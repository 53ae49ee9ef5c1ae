//! One-hot embedding of tabular games into linear form.

use super::{EpisodicGameSpec, LinearGameSpec, Player};

/// Index of (state, action) in the one-hot feature basis. Max-player actions
/// occupy the first `actions_max` slots of each state's block.
fn feature_index(spec: &EpisodicGameSpec, state: usize, player: Player, action: usize) -> usize {
    let block = spec.actions_max + spec.actions_min;
    match player {
        Player::Max => state * block + action,
        Player::Min => state * block + spec.actions_max + action,
    }
}

/// Lift a tabular game to a linear one with `d = S * (A1 + A2)` indicator
/// features. The induced transition and reward tables reproduce the originals
/// exactly.
pub fn lift_tabular_to_linear(spec: &EpisodicGameSpec) -> LinearGameSpec {
    let dim = spec.num_states * (spec.actions_max + spec.actions_min);
    let steps = spec.num_steps();
    let mut features = Vec::with_capacity(steps);
    let mut measures = Vec::with_capacity(steps);
    let mut reward_weights = Vec::with_capacity(steps);
    for h in 0..steps {
        let player = Player::at_step(h);
        let acts = spec.actions_at(h);
        let mut phi_h = Vec::with_capacity(spec.num_states);
        let mut theta_h = vec![vec![0.0; dim]; spec.num_states];
        let mut mu_h = vec![0.0; dim];
        for s in 0..spec.num_states {
            let mut phi_s = Vec::with_capacity(acts);
            for a in 0..acts {
                let idx = feature_index(spec, s, player, a);
                let mut phi = vec![0.0; dim];
                phi[idx] = 1.0;
                phi_s.push(phi);
                for s2 in 0..spec.num_states {
                    theta_h[s2][idx] = spec.transitions[h][s][a][s2];
                }
                mu_h[idx] = spec.rewards[h][s][a];
            }
            phi_h.push(phi_s);
        }
        features.push(phi_h);
        measures.push(theta_h);
        reward_weights.push(mu_h);
    }
    LinearGameSpec {
        half_horizon: spec.half_horizon,
        num_states: spec.num_states,
        actions_max: spec.actions_max,
        actions_min: spec.actions_min,
        dim,
        features,
        measures,
        reward_weights,
        initial_state: spec.initial_state.clone(),
    }
}
