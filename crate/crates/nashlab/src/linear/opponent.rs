//! Pluggable min-player opponents for the independent setting.

use crate::game::EpisodicGameSpec;
use crate::rng::DeterministicRng;
use crate::solve::best_response_min;

/// A min-player the max-player cannot control. At the start of each episode
/// the opponent commits to a pure policy (`mu[i][s]` over min-owned steps),
/// which both drives its actions and lets the harness measure exploitability
/// against the exact best response.
pub trait Opponent {
    fn episode_policy(&mut self, k: u64, max_greedy: &[Vec<usize>]) -> Vec<Vec<usize>>;
}

/// Plays a fixed pure policy forever.
pub struct FixedPure {
    pub mu: Vec<Vec<usize>>,
}

impl FixedPure {
    /// The same action at every (step, state).
    pub fn constant(action: usize, half_horizon: usize, num_states: usize) -> Self {
        FixedPure {
            mu: vec![vec![action; num_states]; half_horizon],
        }
    }
}

impl Opponent for FixedPure {
    fn episode_policy(&mut self, _k: u64, _max_greedy: &[Vec<usize>]) -> Vec<Vec<usize>> {
        self.mu.clone()
    }
}

/// A stationary pure policy drawn once from a seed: the same state-to-action
/// map at every min-owned step and every episode.
pub struct SeededRandomStationary {
    mu: Vec<Vec<usize>>,
}

impl SeededRandomStationary {
    pub fn new(seed: u64, half_horizon: usize, num_states: usize, actions_min: usize) -> Self {
        let mut rng = DeterministicRng::seeded(seed);
        let row: Vec<usize> = (0..num_states).map(|_| rng.below(actions_min)).collect();
        SeededRandomStationary {
            mu: vec![row; half_horizon],
        }
    }
}

impl Opponent for SeededRandomStationary {
    fn episode_policy(&mut self, _k: u64, _max_greedy: &[Vec<usize>]) -> Vec<Vec<usize>> {
        self.mu.clone()
    }
}

/// Adversarial opponent with model access: best-responds exactly to the max
/// player's current greedy policy at each episode start.
pub struct BestResponseOracle {
    spec: EpisodicGameSpec,
}

impl BestResponseOracle {
    pub fn new(spec: EpisodicGameSpec) -> Self {
        BestResponseOracle { spec }
    }
}

impl Opponent for BestResponseOracle {
    fn episode_policy(&mut self, _k: u64, max_greedy: &[Vec<usize>]) -> Vec<Vec<usize>> {
        best_response_min(&self.spec, max_greedy).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures;

    #[test]
    fn seeded_opponent_is_a_pure_function_of_its_seed() {
        let mut a = SeededRandomStationary::new(5, 2, 3, 2);
        let mut b = SeededRandomStationary::new(5, 2, 3, 2);
        assert_eq!(a.episode_policy(1, &[]), b.episode_policy(9, &[]));
        // stationary: identical row per step
        let mu = a.episode_policy(1, &[]);
        assert_eq!(mu[0], mu[1]);
    }

    #[test]
    fn oracle_best_responds_on_g_one() {
        let mut oracle = BestResponseOracle::new(fixtures::g_one());
        // against a0 the best reply is b0; the min step has only gap 0.5 at b1
        assert_eq!(oracle.episode_policy(1, &[vec![0]]), vec![vec![0]]);
        assert_eq!(oracle.episode_policy(2, &[vec![1]]), vec![vec![0]]);
    }
}
