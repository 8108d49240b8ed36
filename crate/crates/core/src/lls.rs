//! Logarithmic least squares priorities.
//!
//! Minimizing `S(x) = sum_ij (ln a_ij - x_i + x_j)^2` with `x_i = ln u_i`
//! under `prod u_i = 1` has the unique solution `x_k = mean_j ln a_kj`, so
//! `u_k` is the geometric mean of row `k`. The residuals `delta_ij` of that
//! fit give the perturbation variance estimate `sigma^2 = S / ((N-1)(N-2))`
//! and the distance `sqrt(S)` from the matrix to the nearest consistent one.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{exp, ln, sqrt};
use crate::matrix::JudgmentMatrix;
use crate::priority::PriorityVector;

/// Default bound on [`ConsistencyReport::distance`] for the consistency verdict.
pub const DEFAULT_CONSISTENCY_TOL: f64 = 1e-9;

/// Residual statistics of the least squares fit.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConsistencyReport {
    /// `None` for `N = 2`, where the estimator's denominator vanishes.
    pub sigma2: Option<f64>,
    pub distance: f64,
    /// `delta_ij = ln a_ij - ln u_i + ln u_j`, antisymmetric.
    pub residuals: Vec<Vec<f64>>,
    pub is_consistent: bool,
}

/// `ln a_ij` with the lower triangle taken as the exact negation of the upper.
pub fn log_matrix(a: &JudgmentMatrix) -> Vec<Vec<f64>> {
    let n = a.n();
    let mut b = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let value = ln(a.get(i, j));
            b[i][j] = value;
            b[j][i] = -value;
        }
    }
    b
}

/// `x_k = ln u_k`, the row means of the log matrix. They sum to zero.
pub fn log_priorities(a: &JudgmentMatrix) -> Vec<f64> {
    let n = a.n() as f64;
    log_matrix(a)
        .iter()
        .map(|row| row.iter().sum::<f64>() / n)
        .collect()
}

/// Priorities as normalized row geometric means.
pub fn lls_priorities(a: &JudgmentMatrix) -> PriorityVector {
    let u = log_priorities(a).into_iter().map(exp).collect();
    PriorityVector::from_unnormalized(u).expect("row geometric means of a positive matrix are positive")
}

/// Residuals, `sigma^2` and distance of `a` from the consistent matrix built on `priorities`.
///
/// Every 2x2 reciprocal matrix is consistent, so `N = 2` reports a distance
/// of exactly zero and no `sigma^2`.
pub fn consistency_report(
    a: &JudgmentMatrix,
    priorities: &PriorityVector,
    consistency_tol: f64,
) -> Result<ConsistencyReport> {
    let n = a.n();
    if priorities.u.len() != n {
        return Err(Error::LengthMismatch { left: priorities.u.len(), right: n });
    }
    if n == 2 {
        return Ok(ConsistencyReport {
            sigma2: None,
            distance: 0.0,
            residuals: vec![vec![0.0; 2]; 2],
            is_consistent: 0.0 <= consistency_tol,
        });
    }
    let b = log_matrix(a);
    let x: Vec<f64> = priorities.u.iter().map(|&u| ln(u)).collect();
    let mut residuals = vec![vec![0.0; n]; n];
    let mut sum_sq = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let delta = b[i][j] - (x[i] - x[j]);
            residuals[i][j] = delta;
            residuals[j][i] = -delta;
            sum_sq += 2.0 * delta * delta;
        }
    }
    let distance = sqrt(sum_sq);
    let dof = ((n - 1) * (n - 2)) as f64;
    Ok(ConsistencyReport {
        sigma2: Some(sum_sq / dof),
        distance,
        residuals,
        is_consistent: distance <= consistency_tol,
    })
}

/// The nearest consistent matrix `b_ij = u_i / u_j` in the log-Frobenius sense.
pub fn consistent_approximation(a: &JudgmentMatrix) -> JudgmentMatrix {
    let p = lls_priorities(a);
    JudgmentMatrix::from_priorities(&p.u)
        .and_then(|b| b.with_labels(a.labels().to_vec()))
        .expect("priorities are positive and labels already match")
}

/// `sqrt(sum_ij (ln a_ij - ln b_ij)^2)`.
pub fn log_distance(a: &JudgmentMatrix, b: &JudgmentMatrix) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::LengthMismatch { left: a.n(), right: b.n() });
    }
    let sum_sq: f64 = a
        .entries()
        .iter()
        .zip(b.entries())
        .map(|(&x, &y)| {
            let d = ln(x) - ln(y);
            d * d
        })
        .sum();
    Ok(sqrt(sum_sq))
}
