//! Dense Cholesky solves for small symmetric positive definite systems.
//!
//! The regression systems here never exceed a few dozen dimensions, and the
//! error contract wants the failing pivot index on non-SPD input, so the
//! factorization is written out rather than pulled from a linear-algebra
//! crate. Solves go through the factorization; no inverse is ever formed.

use crate::error::SpdError;

/// Lower-triangular Cholesky factor of an SPD matrix.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    l: Vec<Vec<f64>>,
}

impl CholeskyFactor {
    pub fn new(matrix: &[Vec<f64>]) -> Result<Self, SpdError> {
        let n = matrix.len();
        let mut l = vec![vec![0.0; n]; n];
        for j in 0..n {
            if matrix[j].len() != n {
                return Err(SpdError::Shape {
                    rows: n,
                    cols: matrix[j].len(),
                    len: n,
                });
            }
            let mut diag = matrix[j][j];
            for k in 0..j {
                diag -= l[j][k] * l[j][k];
            }
            if diag <= 0.0 {
                return Err(SpdError::NotPositiveDefinite { pivot: j });
            }
            l[j][j] = diag.sqrt();
            for i in (j + 1)..n {
                let mut sum = matrix[i][j];
                for k in 0..j {
                    sum -= l[i][k] * l[j][k];
                }
                l[i][j] = sum / l[j][j];
            }
        }
        Ok(CholeskyFactor { l })
    }

    pub fn dim(&self) -> usize {
        self.l.len()
    }

    /// Solve `A x = b` through the factorization (forward then back
    /// substitution).
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.dim();
        debug_assert_eq!(rhs.len(), n);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut sum = rhs[i];
            for k in 0..i {
                sum -= self.l[i][k] * y[k];
            }
            y[i] = sum / self.l[i][i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut sum = y[i];
            for k in (i + 1)..n {
                sum -= self.l[k][i] * x[k];
            }
            x[i] = sum / self.l[i][i];
        }
        x
    }
}

/// `||Ax - b||_inf <= 1e-8 * (1 + ||b||_inf)`, checked after every solve.
pub fn assert_residual(matrix: &[Vec<f64>], x: &[f64], rhs: &[f64]) {
    let mut residual: f64 = 0.0;
    let mut rhs_norm: f64 = 0.0;
    for i in 0..matrix.len() {
        let ax: f64 = matrix[i].iter().zip(x).map(|(m, v)| m * v).sum();
        residual = residual.max((ax - rhs[i]).abs());
        rhs_norm = rhs_norm.max(rhs[i].abs());
    }
    assert!(
        residual <= 1e-8 * (1.0 + rhs_norm),
        "solve residual {residual} exceeds bound {}",
        1e-8 * (1.0 + rhs_norm)
    );
}

/// Solve an SPD system, asserting the residual bound.
pub fn spd_solve(matrix: &[Vec<f64>], rhs: &[f64]) -> Result<Vec<f64>, SpdError> {
    if rhs.len() != matrix.len() {
        return Err(SpdError::Shape {
            rows: matrix.len(),
            cols: matrix.first().map_or(0, Vec::len),
            len: rhs.len(),
        });
    }
    let factor = CholeskyFactor::new(matrix)?;
    let x = factor.solve(rhs);
    assert_residual(matrix, &x, rhs);
    Ok(x)
}

/// UCB width `sqrt(phi^T A^{-1} phi)`; zero iff `phi` is zero.
pub fn ucb_width(matrix: &[Vec<f64>], phi: &[f64]) -> Result<f64, SpdError> {
    let x = spd_solve(matrix, phi)?;
    let quad: f64 = phi.iter().zip(&x).map(|(p, v)| p * v).sum();
    Ok(quad.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::DeterministicRng;

    fn identity(n: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect()
    }

    /// Independent oracle: Gaussian elimination with partial pivoting.
    fn gauss_solve(matrix: &[Vec<f64>], rhs: &[f64]) -> Vec<f64> {
        let n = matrix.len();
        let mut a: Vec<Vec<f64>> = matrix.to_vec();
        let mut b = rhs.to_vec();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
                .unwrap();
            a.swap(col, pivot);
            b.swap(col, pivot);
            for row in (col + 1)..n {
                let factor = a[row][col] / a[col][col];
                for k in col..n {
                    a[row][k] -= factor * a[col][k];
                }
                b[row] -= factor * b[col];
            }
        }
        let mut x = vec![0.0; n];
        for row in (0..n).rev() {
            let mut sum = b[row];
            for k in (row + 1)..n {
                sum -= a[row][k] * x[k];
            }
            x[row] = sum / a[row][row];
        }
        x
    }

    fn random_spd(rng: &mut DeterministicRng, n: usize) -> Vec<Vec<f64>> {
        // B^T B + I is SPD
        let b: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.unit() * 2.0 - 1.0).collect())
            .collect();
        let mut a = identity(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    a[i][j] += b[k][i] * b[k][j];
                }
            }
        }
        a
    }

    #[test]
    fn identity_system_returns_rhs() {
        let b = vec![3.0, -1.5, 0.25];
        assert_eq!(spd_solve(&identity(3), &b).unwrap(), b);
    }

    #[test]
    fn rank_one_update_closed_form() {
        // (I + e1 e1^T) x = e1  =>  x = e1 / 2
        let mut a = identity(3);
        a[0][0] = 2.0;
        let x = spd_solve(&a, &[1.0, 0.0, 0.0]).unwrap();
        assert!((x[0] - 0.5).abs() <= 1e-15);
        assert_eq!(&x[1..], &[0.0, 0.0]);
    }

    #[test]
    fn random_systems_agree_with_elimination_oracle() {
        let mut rng = DeterministicRng::seeded(8);
        for _ in 0..50 {
            let a = random_spd(&mut rng, 8);
            let b: Vec<f64> = (0..8).map(|_| rng.unit() * 4.0 - 2.0).collect();
            let x = spd_solve(&a, &b).unwrap();
            let oracle = gauss_solve(&a, &b);
            for (xi, oi) in x.iter().zip(&oracle) {
                assert!((xi - oi).abs() <= 1e-9, "{xi} vs {oi}");
            }
        }
    }

    #[test]
    fn non_spd_reports_failing_pivot() {
        let a = vec![vec![1.0, 0.0], vec![0.0, -1.0]];
        match spd_solve(&a, &[1.0, 1.0]) {
            Err(SpdError::NotPositiveDefinite { pivot }) => assert_eq!(pivot, 1),
            other => panic!("expected pivot error, got {other:?}"),
        }
    }

    #[test]
    fn width_on_identity_is_feature_norm() {
        assert_eq!(ucb_width(&identity(2), &[1.0, 0.0]).unwrap(), 1.0);
        let w = ucb_width(&identity(2), &[0.6, 0.8]).unwrap();
        assert!((w - 1.0).abs() <= 1e-12);
        assert_eq!(ucb_width(&identity(2), &[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn repeated_one_hot_width_closed_form() {
        // after n pushes of e0 the width at e0 is 1/sqrt(1+n)
        let mut a = identity(4);
        let n = 7;
        a[0][0] += n as f64;
        let phi = [1.0, 0.0, 0.0, 0.0];
        let w = ucb_width(&a, &phi).unwrap();
        assert!((w - 1.0 / (1.0 + n as f64).sqrt()).abs() <= 1e-12);
    }
}
