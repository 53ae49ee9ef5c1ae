//! Per-step ridge regression state: Gram matrix plus raw history.

use super::spd::{assert_residual, CholeskyFactor};
use crate::error::SpdError;

#[derive(Debug, Clone)]
pub struct HistoryEntry {
    pub feature: Vec<f64>,
    pub reward: f64,
    pub next_state: usize,
}

/// `gram = lambda I + sum_i phi_i phi_i^T`, together with the raw episodes
/// it was accumulated from. The regression targets are recomputed from the
/// history every episode, so only the Gram part is incremental.
#[derive(Debug, Clone)]
pub struct RidgeAccumulator {
    pub lambda: f64,
    pub gram: Vec<Vec<f64>>,
    pub history: Vec<HistoryEntry>,
}

impl RidgeAccumulator {
    pub fn new(dim: usize, lambda: f64) -> Self {
        let mut gram = vec![vec![0.0; dim]; dim];
        for (i, row) in gram.iter_mut().enumerate() {
            row[i] = lambda;
        }
        RidgeAccumulator {
            lambda,
            gram,
            history: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    /// Record one transition and fold its rank-one term into the Gram matrix.
    pub fn push(&mut self, feature: Vec<f64>, reward: f64, next_state: usize) {
        debug_assert_eq!(feature.len(), self.dim());
        for i in 0..feature.len() {
            for j in 0..feature.len() {
                self.gram[i][j] += feature[i] * feature[j];
            }
        }
        self.history.push(HistoryEntry {
            feature,
            reward,
            next_state,
        });
    }

    pub fn factor(&self) -> Result<CholeskyFactor, SpdError> {
        CholeskyFactor::new(&self.gram)
    }

    /// Ridge weights for targets `reward_i + value_of_next[next_state_i]`.
    pub fn regression_weights(&self, factor: &CholeskyFactor, value_of_next: &[f64]) -> Vec<f64> {
        let mut rhs = vec![0.0; self.dim()];
        for entry in &self.history {
            let target = entry.reward + value_of_next[entry.next_state];
            for (j, phi_j) in entry.feature.iter().enumerate() {
                rhs[j] += phi_j * target;
            }
        }
        let w = factor.solve(&rhs);
        assert_residual(&self.gram, &w, &rhs);
        w
    }
}
