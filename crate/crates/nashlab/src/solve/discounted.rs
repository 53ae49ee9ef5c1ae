//! Value iteration on the parity-augmented chain.
//!
//! A discounted turn-based game alternates turns by global time parity, so the
//! exact objects live on the augmented state space (to-move, s): `max_to_move`
//! values are read where the max-player acts, `min_to_move` where the
//! min-player acts.

use super::{argmax, argmin, GapMin};
use crate::error::SolveError;
use crate::game::{dot, DiscountedGameSpec, Player};

const MAX_SWEEPS: usize = 5_000_000;

/// A pair of tables indexed by whose turn it is.
#[derive(Debug, Clone, PartialEq)]
pub struct Parity<T> {
    pub max_to_move: T,
    pub min_to_move: T,
}

impl<T> Parity<T> {
    pub fn get(&self, player: Player) -> &T {
        match player {
            Player::Max => &self.max_to_move,
            Player::Min => &self.min_to_move,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DiscountedNashSolution {
    pub vstar: Parity<Vec<f64>>,
    /// `qstar.max_to_move[s][a1]` and `qstar.min_to_move[s][a2]`.
    pub qstar: Parity<Vec<Vec<f64>>>,
    pub gap_plus: Parity<Vec<Vec<f64>>>,
    pub pi_star: Vec<usize>,
    pub mu_star: Vec<usize>,
    pub gap_plus_min: GapMin,
    /// Requested accuracy: `||V - V*||_inf <= tolerance` is guaranteed.
    pub tolerance: f64,
    /// Bellman residual of the returned tables, measured after convergence.
    pub residual: f64,
    pub sweeps: usize,
}

fn backup_max(spec: &DiscountedGameSpec, v_min: &[f64], s: usize, a: usize) -> f64 {
    spec.reward(s, Player::Max, a)
        + spec.discount * dot(spec.transition_row(s, Player::Max, a), v_min)
}

fn backup_min(spec: &DiscountedGameSpec, v_max: &[f64], s: usize, a: usize) -> f64 {
    spec.reward(s, Player::Min, a)
        + spec.discount * dot(spec.transition_row(s, Player::Min, a), v_max)
}

/// Run Jacobi sweeps of the coupled Bellman operator until the sup-norm update
/// guarantees the requested accuracy: stop once
/// `delta <= tol * (1 - gamma) / (2 gamma)`, so `||V - V*||_inf <= tol / 2`.
fn iterate(
    spec: &DiscountedGameSpec,
    tol: f64,
    mut step_max: impl FnMut(&DiscountedGameSpec, &[f64], usize) -> f64,
    mut step_min: impl FnMut(&DiscountedGameSpec, &[f64], usize) -> f64,
) -> Result<(Vec<f64>, Vec<f64>, usize), SolveError> {
    let gamma = spec.discount;
    let threshold = if gamma > 0.0 {
        tol * (1.0 - gamma) / (2.0 * gamma)
    } else {
        f64::INFINITY
    };
    let s_count = spec.num_states;
    let mut v_max = vec![0.0; s_count];
    let mut v_min = vec![0.0; s_count];
    for sweep in 1..=MAX_SWEEPS {
        let new_max: Vec<f64> = (0..s_count).map(|s| step_max(spec, &v_min, s)).collect();
        let new_min: Vec<f64> = (0..s_count).map(|s| step_min(spec, &v_max, s)).collect();
        let mut delta: f64 = 0.0;
        for s in 0..s_count {
            delta = delta.max((new_max[s] - v_max[s]).abs());
            delta = delta.max((new_min[s] - v_min[s]).abs());
        }
        v_max = new_max;
        v_min = new_min;
        if delta <= threshold {
            return Ok((v_max, v_min, sweep));
        }
    }
    Err(SolveError::NonConvergence {
        iterations: MAX_SWEEPS,
        tolerance: tol,
    })
}

/// Exact Nash solution of a discounted game to accuracy `tol`.
///
/// Gap entries below `10 * tol` are treated as zero when the minimum positive
/// gap is extracted, since the converged values carry up to `tol` of error.
pub fn solve_discounted(spec: &DiscountedGameSpec, tol: f64) -> Result<DiscountedNashSolution, SolveError> {
    if !(tol > 0.0) {
        return Err(SolveError::BadTolerance(tol));
    }
    let (v_max, v_min, sweeps) = iterate(
        spec,
        tol,
        |spec, v_min, s| {
            (0..spec.actions_max)
                .map(|a| backup_max(spec, v_min, s, a))
                .fold(f64::NEG_INFINITY, f64::max)
        },
        |spec, v_max, s| {
            (0..spec.actions_min)
                .map(|a| backup_min(spec, v_max, s, a))
                .fold(f64::INFINITY, f64::min)
        },
    )?;
    let s_count = spec.num_states;
    let q_max: Vec<Vec<f64>> = (0..s_count)
        .map(|s| (0..spec.actions_max).map(|a| backup_max(spec, &v_min, s, a)).collect())
        .collect();
    let q_min: Vec<Vec<f64>> = (0..s_count)
        .map(|s| (0..spec.actions_min).map(|a| backup_min(spec, &v_max, s, a)).collect())
        .collect();
    let pi_star: Vec<usize> = q_max.iter().map(|row| argmax(row)).collect();
    let mu_star: Vec<usize> = q_min.iter().map(|row| argmin(row)).collect();
    let vstar_max: Vec<f64> = (0..s_count).map(|s| q_max[s][pi_star[s]]).collect();
    let vstar_min: Vec<f64> = (0..s_count).map(|s| q_min[s][mu_star[s]]).collect();
    let mut residual: f64 = 0.0;
    for s in 0..s_count {
        let t_max = (0..spec.actions_max)
            .map(|a| {
                spec.reward(s, Player::Max, a)
                    + spec.discount * dot(spec.transition_row(s, Player::Max, a), &vstar_min)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let t_min = (0..spec.actions_min)
            .map(|a| {
                spec.reward(s, Player::Min, a)
                    + spec.discount * dot(spec.transition_row(s, Player::Min, a), &vstar_max)
            })
            .fold(f64::INFINITY, f64::min);
        residual = residual.max((t_max - vstar_max[s]).abs());
        residual = residual.max((t_min - vstar_min[s]).abs());
    }
    let zero_threshold = 10.0 * tol;
    let mut min_positive: Option<f64> = None;
    let gap = |v: &[f64], q: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        q.iter()
            .enumerate()
            .map(|(s, row)| row.iter().map(|&x| (v[s] - x).abs()).collect())
            .collect()
    };
    let gap_max = gap(&vstar_max, &q_max);
    let gap_min_side = gap(&vstar_min, &q_min);
    for g in gap_max.iter().chain(gap_min_side.iter()).flatten() {
        if *g > zero_threshold && min_positive.map_or(true, |m| *g < m) {
            min_positive = Some(*g);
        }
    }
    Ok(DiscountedNashSolution {
        vstar: Parity { max_to_move: vstar_max, min_to_move: vstar_min },
        qstar: Parity { max_to_move: q_max, min_to_move: q_min },
        gap_plus: Parity { max_to_move: gap_max, min_to_move: gap_min_side },
        pi_star,
        mu_star,
        gap_plus_min: GapMin::from_scan(min_positive),
        tolerance: tol,
        residual,
        sweeps,
    })
}

/// Value of a fixed stationary pair on the parity-augmented chain, to
/// accuracy `tol`.
pub fn evaluate_pair_discounted(
    spec: &DiscountedGameSpec,
    pi: &[usize],
    mu: &[usize],
    tol: f64,
) -> Result<Parity<Vec<f64>>, SolveError> {
    let (v_max, v_min, _) = iterate(
        spec,
        tol,
        |spec, v_min, s| backup_max(spec, v_min, s, pi[s]),
        |spec, v_max, s| backup_min(spec, v_max, s, mu[s]),
    )?;
    Ok(Parity { max_to_move: v_max, min_to_move: v_min })
}

/// Max-player best response to a fixed stationary min-player policy.
pub fn best_response_max_discounted(
    spec: &DiscountedGameSpec,
    mu: &[usize],
    tol: f64,
) -> Result<(Vec<usize>, Parity<Vec<f64>>), SolveError> {
    let (v_max, v_min, _) = iterate(
        spec,
        tol,
        |spec, v_min, s| {
            (0..spec.actions_max)
                .map(|a| backup_max(spec, v_min, s, a))
                .fold(f64::NEG_INFINITY, f64::max)
        },
        |spec, v_max, s| backup_min(spec, v_max, s, mu[s]),
    )?;
    let pi = (0..spec.num_states)
        .map(|s| {
            let row: Vec<f64> = (0..spec.actions_max).map(|a| backup_max(spec, &v_min, s, a)).collect();
            argmax(&row)
        })
        .collect();
    Ok((pi, Parity { max_to_move: v_max, min_to_move: v_min }))
}

/// Min-player best response to a fixed stationary max-player policy.
pub fn best_response_min_discounted(
    spec: &DiscountedGameSpec,
    pi: &[usize],
    tol: f64,
) -> Result<(Vec<usize>, Parity<Vec<f64>>), SolveError> {
    let (v_max, v_min, _) = iterate(
        spec,
        tol,
        |spec, v_min, s| backup_max(spec, v_min, s, pi[s]),
        |spec, v_max, s| {
            (0..spec.actions_min)
                .map(|a| backup_min(spec, v_max, s, a))
                .fold(f64::INFINITY, f64::min)
        },
    )?;
    let mu = (0..spec.num_states)
        .map(|s| {
            let row: Vec<f64> = (0..spec.actions_min).map(|a| backup_min(spec, &v_max, s, a)).collect();
            argmin(&row)
        })
        .collect();
    Ok((mu, Parity { max_to_move: v_max, min_to_move: v_min }))
}

/// Duality gap of a stationary pair at the initial augmented state
/// (max-to-move at the spec's initial state).
pub fn duality_gap_discounted(
    spec: &DiscountedGameSpec,
    pi: &[usize],
    mu: &[usize],
    tol: f64,
) -> Result<f64, SolveError> {
    let (_, v_vs_mu) = best_response_max_discounted(spec, mu, tol)?;
    let (_, v_vs_pi) = best_response_min_discounted(spec, pi, tol)?;
    Ok(v_vs_mu.max_to_move[spec.initial_state] - v_vs_pi.max_to_move[spec.initial_state])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures;
    use crate::rng::DeterministicRng;

    #[test]
    fn g_disc_geometric_series_values() {
        let sol = solve_discounted(&fixtures::g_disc(), 1e-10).unwrap();
        assert!((sol.vstar.max_to_move[0] - 4.0 / 3.0).abs() <= 1e-10);
        assert!((sol.vstar.min_to_move[0] - 2.0 / 3.0).abs() <= 1e-10);
        assert!((sol.gap_plus.max_to_move[0][1] - 1.0).abs() <= 1e-10);
        match sol.gap_plus_min {
            GapMin::Value(g) => assert!((g - 1.0).abs() <= 1e-9),
            GapMin::AllZero => panic!("expected positive gap"),
        }
        assert_eq!(sol.pi_star, vec![0]);
        assert_eq!(sol.mu_star, vec![0]);
        assert!(sol.residual <= 1e-10);
    }

    #[test]
    fn myopic_limit_at_zero_discount() {
        // gamma = 0 fails spec validation but the solver handles the myopic
        // limit directly: one sweep is exact.
        let mut spec = fixtures::g_disc();
        spec.discount = 0.0;
        let sol = solve_discounted(&spec, 1e-10).unwrap();
        assert_eq!(sol.vstar.max_to_move[0], 1.0);
        assert_eq!(sol.vstar.min_to_move[0], 0.0);
    }

    #[test]
    fn random_game_bellman_residual_within_tolerance() {
        let mut rng = DeterministicRng::seeded(2);
        for _ in 0..5 {
            let s_count = 3;
            let acts = 2 + 2;
            let mut transitions = Vec::new();
            let mut rewards = Vec::new();
            for _ in 0..s_count {
                let mut t_s = Vec::new();
                let mut r_s = Vec::new();
                for _ in 0..acts {
                    let mut row: Vec<f64> = (0..s_count).map(|_| rng.unit_open_closed()).collect();
                    let total: f64 = row.iter().sum();
                    row.iter_mut().for_each(|p| *p /= total);
                    t_s.push(row);
                    r_s.push(rng.unit());
                }
                transitions.push(t_s);
                rewards.push(r_s);
            }
            let spec = crate::game::DiscountedGameSpec {
                num_states: s_count,
                actions_max: 2,
                actions_min: 2,
                transitions,
                rewards,
                discount: 0.9,
                initial_state: 0,
            };
            assert!(spec.validate().is_ok());
            let tol = 1e-9;
            let sol = solve_discounted(&spec, tol).unwrap();
            assert!(sol.residual <= tol, "residual {}", sol.residual);
        }
    }

    #[test]
    fn pair_evaluation_matches_nash_at_equilibrium() {
        let spec = fixtures::g_disc();
        let sol = solve_discounted(&spec, 1e-10).unwrap();
        let v = evaluate_pair_discounted(&spec, &sol.pi_star, &sol.mu_star, 1e-10).unwrap();
        assert!((v.max_to_move[0] - sol.vstar.max_to_move[0]).abs() <= 1e-9);
        let gap = duality_gap_discounted(&spec, &sol.pi_star, &sol.mu_star, 1e-10).unwrap();
        assert!(gap.abs() <= 1e-9);
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        assert!(matches!(
            solve_discounted(&fixtures::g_disc(), 0.0),
            Err(SolveError::BadTolerance(_))
        ));
    }
}
