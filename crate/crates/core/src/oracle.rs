//! Verification route for the least squares priorities.
//!
//! Setting the gradient of `S(x)` to zero gives `Q x = d` with
//! `Q = I - (1/N) 11^T` and `d_k` the mean of row `k` of `[ln a_ij]`. `Q` is
//! singular (its null space is the constant vector), so the minimum norm
//! solution is found by solving the bordered system
//!
//! ```text
//! [ Q    1 ] [x]   [d]
//! [ 1^T  0 ] [l] = [0]
//! ```
//!
//! with Gaussian elimination. Nothing here shares code with [`crate::lls`].

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{exp, ln};
use crate::matrix::JudgmentMatrix;
use crate::priority::PriorityVector;

/// The normal equations `Q x = d` of the log least squares objective.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalEquations {
    pub n: usize,
    /// Row-major `N x N`.
    pub q: Vec<f64>,
    pub d: Vec<f64>,
}

impl NormalEquations {
    pub fn new(a: &JudgmentMatrix) -> Self {
        let n = a.n();
        let inv_n = 1.0 / n as f64;
        let mut q = vec![-inv_n; n * n];
        for k in 0..n {
            q[k * n + k] = 1.0 - inv_n;
        }
        let d = (0..n)
            .map(|k| a.row(k).iter().map(|&v| ln(v)).sum::<f64>() * inv_n)
            .collect();
        Self { n, q, d }
    }

    /// Minimum norm solution of `Q x = d`.
    pub fn solve_min_norm(&self) -> Vec<f64> {
        let n = self.n;
        let size = n + 1;
        let mut m = vec![0.0; size * size];
        let mut rhs = vec![0.0; size];
        for i in 0..n {
            for j in 0..n {
                m[i * size + j] = self.q[i * n + j];
            }
            m[i * size + n] = 1.0;
            m[n * size + i] = 1.0;
            rhs[i] = self.d[i];
        }
        let mut solution = gaussian_elimination(m, rhs, size)
            .expect("bordered system is nonsingular for N >= 2");
        solution.truncate(n);
        solution
    }
}

/// `S(x) = sum_ij (ln a_ij - x_i + x_j)^2`.
pub fn lls_objective(a: &JudgmentMatrix, x: &[f64]) -> f64 {
    let n = a.n();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let r = ln(a.get(i, j)) - x[i] + x[j];
            total += r * r;
        }
    }
    total
}

/// Log priorities from the linear system.
pub fn min_norm_log_solution(a: &JudgmentMatrix) -> Vec<f64> {
    NormalEquations::new(a).solve_min_norm()
}

/// Priorities from the linear system, for cross-checking [`crate::lls_priorities`].
pub fn lls_linear_system_oracle(a: &JudgmentMatrix) -> PriorityVector {
    let u = min_norm_log_solution(a).into_iter().map(exp).collect();
    PriorityVector::from_unnormalized(u).expect("exponentials are positive")
}

/// Solves the dense system with partial pivoting. `None` when a pivot vanishes.
fn gaussian_elimination(mut m: Vec<f64>, mut rhs: Vec<f64>, size: usize) -> Option<Vec<f64>> {
    for col in 0..size {
        let pivot = (col..size)
            .max_by(|&r1, &r2| m[r1 * size + col].abs().total_cmp(&m[r2 * size + col].abs()))?;
        if m[pivot * size + col].abs() < 1e-14 {
            return None;
        }
        if pivot != col {
            for k in 0..size {
                m.swap(pivot * size + k, col * size + k);
            }
            rhs.swap(pivot, col);
        }
        let p = m[col * size + col];
        for row in (col + 1)..size {
            let factor = m[row * size + col] / p;
            if factor == 0.0 {
                continue;
            }
            for k in col..size {
                m[row * size + k] -= factor * m[col * size + k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; size];
    for row in (0..size).rev() {
        let tail: f64 = ((row + 1)..size).map(|k| m[row * size + k] * x[k]).sum();
        x[row] = (rhs[row] - tail) / m[row * size + row];
    }
    Some(x)
}
