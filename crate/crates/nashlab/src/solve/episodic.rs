//! Backward-induction solver and exact policy analysis for episodic games.

use super::{argmax, argmin, GapMin, NashSolution, PolicyPair, GAP_ZERO_TOL};
use crate::game::{dot, EpisodicGameSpec, InitialState, Player};

/// Expected value of a value row under the spec's initial-state law.
pub fn initial_value(spec: &EpisodicGameSpec, v_row: &[f64]) -> f64 {
    match &spec.initial_state {
        InitialState::Fixed(s) => v_row[*s],
        InitialState::Distribution(d) => dot(d, v_row),
    }
}

/// Exact Nash solution by backward induction: max at max-owned steps, min at
/// min-owned steps, ties broken toward the lowest action index.
pub fn solve_episodic(spec: &EpisodicGameSpec) -> NashSolution {
    let steps = spec.num_steps();
    let s_count = spec.num_states;
    let mut vstar = vec![vec![0.0; s_count]; steps + 1];
    let mut qstar: Vec<Vec<Vec<f64>>> = Vec::with_capacity(steps);
    let mut pi_star = vec![vec![0usize; s_count]; spec.half_horizon];
    let mut mu_star = vec![vec![0usize; s_count]; spec.half_horizon];
    for _ in 0..steps {
        qstar.push(Vec::new());
    }
    for h in (0..steps).rev() {
        let acts = spec.actions_at(h);
        let mut q_h = vec![vec![0.0; acts]; s_count];
        for s in 0..s_count {
            for a in 0..acts {
                q_h[s][a] = spec.rewards[h][s][a] + dot(&spec.transitions[h][s][a], &vstar[h + 1]);
            }
            match Player::at_step(h) {
                Player::Max => {
                    let a = argmax(&q_h[s]);
                    pi_star[h / 2][s] = a;
                    vstar[h][s] = q_h[s][a];
                }
                Player::Min => {
                    let a = argmin(&q_h[s]);
                    mu_star[h / 2][s] = a;
                    vstar[h][s] = q_h[s][a];
                }
            }
        }
        qstar[h] = q_h;
    }
    let mut gap_plus = Vec::with_capacity(steps);
    let mut min_positive: Option<f64> = None;
    for h in 0..steps {
        let mut g_h = vec![vec![0.0; spec.actions_at(h)]; s_count];
        for s in 0..s_count {
            for a in 0..spec.actions_at(h) {
                let g = (vstar[h][s] - qstar[h][s][a]).abs();
                g_h[s][a] = g;
                if g > GAP_ZERO_TOL && min_positive.map_or(true, |m| g < m) {
                    min_positive = Some(g);
                }
            }
        }
        gap_plus.push(g_h);
    }
    NashSolution {
        vstar,
        qstar,
        pi_star,
        mu_star,
        gap_plus,
        gap_plus_min: GapMin::from_scan(min_positive),
    }
}

/// Exact value tables of a fixed policy pair.
pub fn evaluate_pair_episodic(spec: &EpisodicGameSpec, pair: &PolicyPair) -> Vec<Vec<f64>> {
    let steps = spec.num_steps();
    let mut v = vec![vec![0.0; spec.num_states]; steps + 1];
    for h in (0..steps).rev() {
        for s in 0..spec.num_states {
            let a = pair.action_at(h, s);
            v[h][s] = spec.rewards[h][s][a] + dot(&spec.transitions[h][s][a], &v[h + 1]);
        }
    }
    v
}

/// Min-player best response to a fixed max-player policy.
/// Returns the responding policy and the value tables `V^{pi,+}`.
pub fn best_response_min(spec: &EpisodicGameSpec, pi: &[Vec<usize>]) -> (Vec<Vec<usize>>, Vec<Vec<f64>>) {
    best_response(spec, pi, Player::Min)
}

/// Max-player best response to a fixed min-player policy.
pub fn best_response_max(spec: &EpisodicGameSpec, mu: &[Vec<usize>]) -> (Vec<Vec<usize>>, Vec<Vec<f64>>) {
    best_response(spec, mu, Player::Max)
}

fn best_response(
    spec: &EpisodicGameSpec,
    fixed: &[Vec<usize>],
    responder: Player,
) -> (Vec<Vec<usize>>, Vec<Vec<f64>>) {
    let steps = spec.num_steps();
    let mut v = vec![vec![0.0; spec.num_states]; steps + 1];
    let mut response = vec![vec![0usize; spec.num_states]; spec.half_horizon];
    let mut q_row = Vec::new();
    for h in (0..steps).rev() {
        let acts = spec.actions_at(h);
        for s in 0..spec.num_states {
            if Player::at_step(h) == responder {
                q_row.clear();
                for a in 0..acts {
                    q_row.push(spec.rewards[h][s][a] + dot(&spec.transitions[h][s][a], &v[h + 1]));
                }
                let a = match responder {
                    Player::Max => argmax(&q_row),
                    Player::Min => argmin(&q_row),
                };
                response[h / 2][s] = a;
                v[h][s] = q_row[a];
            } else {
                let a = fixed[h / 2][s];
                v[h][s] = spec.rewards[h][s][a] + dot(&spec.transitions[h][s][a], &v[h + 1]);
            }
        }
    }
    (response, v)
}

/// `V1^{+,mu}(s1) - V1^{pi,+}(s1)`: zero exactly at Nash pairs, positive
/// otherwise.
pub fn duality_gap(spec: &EpisodicGameSpec, pair: &PolicyPair) -> f64 {
    let (_, v_vs_mu) = best_response_max(spec, &pair.mu);
    let (_, v_vs_pi) = best_response_min(spec, &pair.pi);
    initial_value(spec, &v_vs_mu[0]) - initial_value(spec, &v_vs_pi[0])
}

/// Expected sum of signed gaps along the pair's trajectory, computed by exact
/// forward occupancy propagation. Equals `V1* - V1^{pi,mu}` at the initial
/// state; the identity is verified to 1e-10 on every call.
pub fn exact_gap_sum(spec: &EpisodicGameSpec, solution: &NashSolution, pair: &PolicyPair) -> f64 {
    let steps = spec.num_steps();
    let mut occupancy = match &spec.initial_state {
        InitialState::Fixed(s) => {
            let mut d = vec![0.0; spec.num_states];
            d[*s] = 1.0;
            d
        }
        InitialState::Distribution(d) => d.clone(),
    };
    let mut total = 0.0;
    for h in 0..steps {
        let mut next = vec![0.0; spec.num_states];
        for s in 0..spec.num_states {
            if occupancy[s] == 0.0 {
                continue;
            }
            let a = pair.action_at(h, s);
            total += occupancy[s] * (solution.vstar[h][s] - solution.qstar[h][s][a]);
            for (s2, &p) in spec.transitions[h][s][a].iter().enumerate() {
                next[s2] += occupancy[s] * p;
            }
        }
        occupancy = next;
    }
    let direct = initial_value(spec, &solution.vstar[0])
        - initial_value(spec, &evaluate_pair_episodic(spec, pair)[0]);
    assert!(
        (total - direct).abs() <= 1e-10,
        "gap-sum identity violated: occupancy route {total} vs direct route {direct}"
    );
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{fixtures, generate_random_episodic};
    use crate::rng::DeterministicRng;
    use crate::solve::GapMin;

    #[test]
    fn g_one_hand_values() {
        let spec = fixtures::g_one();
        let sol = solve_episodic(&spec);
        assert_eq!(sol.vstar[1][0], 0.0); // min plays b0
        assert_eq!(sol.qstar[0][0][0], 1.0);
        assert_eq!(sol.vstar[0][0], 1.0);
        assert_eq!(sol.gap_plus[0][0][1], 0.75);
        assert_eq!(sol.gap_plus[1][0][1], 0.5);
        assert_eq!(sol.gap_plus_min, GapMin::Value(0.5));
        assert_eq!(sol.pi_star, vec![vec![0]]);
        assert_eq!(sol.mu_star, vec![vec![0]]);
    }

    #[test]
    fn zero_reward_game_is_all_zero() {
        let sol = solve_episodic(&fixtures::zero_reward(3, 2, 2, 2));
        assert!(sol.vstar.iter().flatten().all(|&v| v == 0.0));
        assert_eq!(sol.gap_plus_min, GapMin::AllZero);
    }

    #[test]
    fn g_one_pair_values() {
        let spec = fixtures::g_one();
        let nash = PolicyPair { pi: vec![vec![0]], mu: vec![vec![0]] };
        assert_eq!(initial_value(&spec, &evaluate_pair_episodic(&spec, &nash)[0]), 1.0);
        let worst = PolicyPair { pi: vec![vec![1]], mu: vec![vec![1]] };
        assert_eq!(initial_value(&spec, &evaluate_pair_episodic(&spec, &worst)[0]), 0.75);
    }

    #[test]
    fn monte_carlo_agrees_with_exact_evaluation() {
        let spec = generate_random_episodic(3, 2, 3, 2, 5).unwrap();
        let pair = PolicyPair {
            pi: vec![vec![1, 0, 1], vec![0, 1, 0]],
            mu: vec![vec![2, 0, 1], vec![0, 2, 2]],
        };
        let exact = initial_value(&spec, &evaluate_pair_episodic(&spec, &pair)[0]);
        // independent simulation oracle
        let mut rng = DeterministicRng::seeded(99);
        let n = 100_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let mut s = 0usize;
            let mut ret = 0.0;
            for h in 0..spec.num_steps() {
                let a = pair.action_at(h, s);
                ret += spec.rewards[h][s][a];
                s = rng.sample_row(&spec.transitions[h][s][a]);
            }
            sum += ret;
            sum_sq += ret * ret;
        }
        let mean = sum / n as f64;
        let var = (sum_sq / n as f64 - mean * mean).max(0.0);
        let sigma_mean = (var / n as f64).sqrt();
        assert!(
            (mean - exact).abs() <= 3.0 * sigma_mean,
            "simulated {mean} vs exact {exact} (3 sigma = {})",
            3.0 * sigma_mean
        );
    }

    #[test]
    fn g_one_best_responses() {
        let spec = fixtures::g_one();
        let (mu, v) = best_response_min(&spec, &[vec![0]]);
        assert_eq!(mu, vec![vec![0]]);
        assert_eq!(v[0][0], 1.0);
        let (pi, v) = best_response_max(&spec, &[vec![1]]);
        assert_eq!(pi, vec![vec![0]]);
        assert_eq!(v[0][0], 1.5);
    }

    #[test]
    fn best_response_dominates_every_enumerated_reply() {
        let spec = generate_random_episodic(2, 2, 2, 1, 13).unwrap();
        let pi = vec![vec![1, 0]];
        let (mu_star, v_br) = best_response_min(&spec, &pi);
        let br_value = initial_value(&spec, &v_br[0]);
        let mut best_seen = f64::INFINITY;
        for m0 in 0..2 {
            for m1 in 0..2 {
                let pair = PolicyPair { pi: pi.clone(), mu: vec![vec![m0, m1]] };
                let v = initial_value(&spec, &evaluate_pair_episodic(&spec, &pair)[0]);
                assert!(br_value <= v + 1e-12);
                best_seen = best_seen.min(v);
            }
        }
        assert!((br_value - best_seen).abs() <= 1e-12);
        let pair = PolicyPair { pi: pi.clone(), mu: mu_star };
        let v = initial_value(&spec, &evaluate_pair_episodic(&spec, &pair)[0]);
        assert!((v - br_value).abs() <= 1e-12);
    }

    #[test]
    fn g_one_duality_gaps() {
        let spec = fixtures::g_one();
        let nash = PolicyPair { pi: vec![vec![0]], mu: vec![vec![0]] };
        assert_eq!(duality_gap(&spec, &nash), 0.0);
        let off = PolicyPair { pi: vec![vec![1]], mu: vec![vec![0]] };
        assert_eq!(duality_gap(&spec, &off), 0.75);
    }

    #[test]
    fn duality_gap_nonnegative_across_random_pairs() {
        let spec = generate_random_episodic(3, 2, 2, 2, 21).unwrap();
        let mut rng = DeterministicRng::seeded(4);
        for _ in 0..100 {
            let pair = PolicyPair {
                pi: (0..2).map(|_| (0..3).map(|_| rng.below(2)).collect()).collect(),
                mu: (0..2).map(|_| (0..3).map(|_| rng.below(2)).collect()).collect(),
            };
            assert!(duality_gap(&spec, &pair) >= -1e-12);
        }
    }

    #[test]
    fn gap_sum_matches_hand_values_on_g_one() {
        let spec = fixtures::g_one();
        let sol = solve_episodic(&spec);
        let nash = sol.nash_pair();
        assert_eq!(exact_gap_sum(&spec, &sol, &nash), 0.0);
        let off = PolicyPair { pi: vec![vec![1]], mu: vec![vec![0]] };
        assert_eq!(exact_gap_sum(&spec, &sol, &off), 0.75);
    }

    #[test]
    fn gap_sum_identity_on_random_pairs() {
        let mut rng = DeterministicRng::seeded(17);
        for seed in 0..10 {
            let spec = generate_random_episodic(3, 2, 2, 2, seed).unwrap();
            let sol = solve_episodic(&spec);
            for _ in 0..10 {
                let pair = PolicyPair {
                    pi: (0..2).map(|_| (0..3).map(|_| rng.below(2)).collect()).collect(),
                    mu: (0..2).map(|_| (0..3).map(|_| rng.below(2)).collect()).collect(),
                };
                // the identity itself is asserted inside exact_gap_sum
                let sum = exact_gap_sum(&spec, &sol, &pair);
                assert!(sum.is_finite());
            }
        }
    }
}
