//! Enumeration oracles: full pure-policy sweeps.

use super::{GapMin, GAP_ZERO_TOL};
use crate::error::SolveError;
use crate::game::{dot, EpisodicGameSpec, Player};
use crate::solve::initial_value;

/// Default cap on the number of pure policy *pairs* enumerated by
/// [`brute_force_solve`].
pub const DEFAULT_PAIR_LIMIT: u128 = 1_000_000;

/// Default cap on the number of pure min-player policies enumerated by
/// [`gap_min_independent`].
pub const DEFAULT_GAP_ENUM_LIMIT: u128 = 100_000;

/// Odometer over all pure policies of one player: a flat digit vector indexed
/// by (owned step ordinal * S + state).
struct PolicyOdometer {
    digits: Vec<usize>,
    base: usize,
    fresh: bool,
}

impl PolicyOdometer {
    fn new(slots: usize, base: usize) -> Self {
        Self {
            digits: vec![0; slots],
            base,
            fresh: true,
        }
    }

    fn next(&mut self) -> Option<&[usize]> {
        if self.fresh {
            self.fresh = false;
            return Some(&self.digits);
        }
        for d in self.digits.iter_mut() {
            *d += 1;
            if *d < self.base {
                return Some(&self.digits);
            }
            *d = 0;
        }
        None
    }
}

fn policy_count(base: usize, slots: usize) -> Option<u128> {
    (base as u128).checked_pow(slots as u32)
}

/// Value at the initial state of the pair encoded as flat digit vectors.
fn value_of_digits(
    spec: &EpisodicGameSpec,
    pi: &[usize],
    mu: &[usize],
    v_cur: &mut [f64],
    v_next: &mut [f64],
) -> f64 {
    v_next.fill(0.0);
    let s_count = spec.num_states;
    for h in (0..spec.num_steps()).rev() {
        for s in 0..s_count {
            let a = match Player::at_step(h) {
                Player::Max => pi[(h / 2) * s_count + s],
                Player::Min => mu[(h / 2) * s_count + s],
            };
            v_cur[s] = spec.rewards[h][s][a] + dot(&spec.transitions[h][s][a], v_next);
        }
        v_next.copy_from_slice(v_cur);
    }
    initial_value(spec, v_cur)
}

/// Nash value at the initial state by exhaustive enumeration of all pure
/// policy pairs. Also verifies max-min = min-max (within 1e-10), which holds
/// because turn-based games admit pure equilibria.
pub fn brute_force_solve(spec: &EpisodicGameSpec, limit: Option<u128>) -> Result<f64, SolveError> {
    let limit = limit.unwrap_or(DEFAULT_PAIR_LIMIT);
    let slots = spec.half_horizon * spec.num_states;
    let count_max = policy_count(spec.actions_max, slots);
    let count_min = policy_count(spec.actions_min, slots);
    let pairs = count_max
        .zip(count_min)
        .and_then(|(a, b)| a.checked_mul(b))
        .ok_or(SolveError::EnumerationLimit {
            count: u128::MAX,
            limit,
        })?;
    if pairs > limit {
        return Err(SolveError::EnumerationLimit { count: pairs, limit });
    }
    let n_min = count_min.unwrap() as usize;
    let mut v_cur = vec![0.0; spec.num_states];
    let mut v_next = vec![0.0; spec.num_states];
    // per-min-policy running max over max policies, for the min-max side
    let mut per_mu_max = vec![f64::NEG_INFINITY; n_min];
    let mut max_min = f64::NEG_INFINITY;
    let mut pi_iter = PolicyOdometer::new(slots, spec.actions_max);
    while let Some(pi) = pi_iter.next() {
        let pi = pi.to_vec();
        let mut min_over_mu = f64::INFINITY;
        let mut mu_iter = PolicyOdometer::new(slots, spec.actions_min);
        let mut mu_index = 0;
        while let Some(mu) = mu_iter.next() {
            let v = value_of_digits(spec, &pi, mu, &mut v_cur, &mut v_next);
            min_over_mu = min_over_mu.min(v);
            if v > per_mu_max[mu_index] {
                per_mu_max[mu_index] = v;
            }
            mu_index += 1;
        }
        max_min = max_min.max(min_over_mu);
    }
    let min_max = per_mu_max.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(
        (max_min - min_max).abs() <= 1e-10,
        "minimax equality violated: max-min {max_min} vs min-max {min_max}"
    );
    Ok(max_min)
}

/// Minimum positive max-player gap over every pure min-player policy:
/// for each mu, the best-response tables `V^{+,mu}, Q^{+,mu}` are computed and
/// the gaps `|V - Q|` at the max-player's steps are scanned.
pub fn gap_min_independent(spec: &EpisodicGameSpec, limit: Option<u128>) -> Result<GapMin, SolveError> {
    let limit = limit.unwrap_or(DEFAULT_GAP_ENUM_LIMIT);
    let slots = spec.half_horizon * spec.num_states;
    let count_min = policy_count(spec.actions_min, slots).ok_or(SolveError::EnumerationLimit {
        count: u128::MAX,
        limit,
    })?;
    if count_min > limit {
        return Err(SolveError::EnumerationLimit {
            count: count_min,
            limit,
        });
    }
    let steps = spec.num_steps();
    let s_count = spec.num_states;
    let mut min_positive: Option<f64> = None;
    let mut mu_iter = PolicyOdometer::new(slots, spec.actions_min);
    let mut v = vec![vec![0.0; s_count]; steps + 1];
    let mut q_row = Vec::new();
    while let Some(mu) = mu_iter.next() {
        for h in (0..steps).rev() {
            let acts = spec.actions_at(h);
            for s in 0..s_count {
                q_row.clear();
                for a in 0..acts {
                    q_row.push(spec.rewards[h][s][a] + dot(&spec.transitions[h][s][a], &v[h + 1]));
                }
                match Player::at_step(h) {
                    Player::Max => {
                        let best = q_row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                        v[h][s] = best;
                        for &q in &q_row {
                            let g = best - q;
                            if g > GAP_ZERO_TOL && min_positive.map_or(true, |m| g < m) {
                                min_positive = Some(g);
                            }
                        }
                    }
                    Player::Min => {
                        v[h][s] = q_row[mu[(h / 2) * s_count + s]];
                    }
                }
            }
        }
    }
    Ok(GapMin::from_scan(min_positive))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{fixtures, generate_random_episodic};
    use crate::solve::solve_episodic;

    #[test]
    fn g_one_value_is_one() {
        assert_eq!(brute_force_solve(&fixtures::g_one(), None).unwrap(), 1.0);
    }

    #[test]
    fn zero_reward_value_is_zero() {
        assert_eq!(brute_force_solve(&fixtures::zero_reward(2, 2, 2, 1), None).unwrap(), 0.0);
    }

    #[test]
    fn cross_check_with_backward_induction() {
        let spec = generate_random_episodic(2, 2, 2, 1, 7).unwrap();
        let brute = brute_force_solve(&spec, None).unwrap();
        let sol = solve_episodic(&spec);
        let exact = initial_value(&spec, &sol.vstar[0]);
        assert!((brute - exact).abs() <= 1e-10, "{brute} vs {exact}");
    }

    #[test]
    fn enumeration_limit_enforced() {
        let spec = generate_random_episodic(4, 3, 3, 2, 1).unwrap();
        match brute_force_solve(&spec, None) {
            Err(SolveError::EnumerationLimit { .. }) => {}
            other => panic!("expected limit error, got {other:?}"),
        }
    }

    #[test]
    fn g_one_independent_gap() {
        assert_eq!(
            gap_min_independent(&fixtures::g_one(), None).unwrap(),
            GapMin::Value(0.75)
        );
    }

    #[test]
    fn zero_reward_independent_gap_flagged() {
        assert_eq!(
            gap_min_independent(&fixtures::zero_reward(2, 2, 2, 1), None).unwrap(),
            GapMin::AllZero
        );
    }

    #[test]
    fn single_min_policy_reduces_to_one_table() {
        // A2 = 1: only one pure mu, so the result is that table's minimum
        // positive max-step gap.
        let spec = generate_random_episodic(2, 2, 1, 1, 3).unwrap();
        let result = gap_min_independent(&spec, None).unwrap();
        let (_, v) = crate::solve::best_response_max(&spec, &[vec![0, 0]]);
        let mut expected: Option<f64> = None;
        for s in 0..2 {
            for a in 0..2 {
                let q = spec.rewards[0][s][a]
                    + crate::game::dot(&spec.transitions[0][s][a], &v[1]);
                let g = v[0][s] - q;
                if g > GAP_ZERO_TOL && expected.map_or(true, |m| g < m) {
                    expected = Some(g);
                }
            }
        }
        assert_eq!(result, GapMin::from_scan(expected));
    }
}
