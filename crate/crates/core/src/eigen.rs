//! Principal eigenvector priorities by power iteration.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::JudgmentMatrix;
use crate::priority::{check_positive, rank_descending};

/// Negative inconsistency indices above this are rounding noise and reported as 0.
const MU_CLAMP: f64 = -1e-8;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EigenReport {
    pub lambda_max: f64,
    /// Sum-normalized principal eigenvector.
    pub principal_w: Vec<f64>,
    pub ranking: Vec<usize>,
    /// `(lambda_max - N) / (N - 1)`.
    pub mu: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl EigenReport {
    /// Turns a non-converged report into [`Error::NotConverged`].
    pub fn into_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged { iterations: self.iterations })
        }
    }
}

/// Power iteration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIteration {
    /// Stop once successive normalized vectors differ by less than this in max norm.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PowerIteration {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 10_000 }
    }
}

impl PowerIteration {
    pub fn new(tol: f64, max_iter: usize) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidParameter("tolerance must be positive and finite"));
        }
        if max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1"));
        }
        Ok(Self { tol, max_iter })
    }

    /// Runs from the uniform vector.
    pub fn solve(&self, a: &JudgmentMatrix) -> EigenReport {
        let n = a.n();
        self.iterate(a, vec![1.0 / n as f64; n])
    }

    /// Runs from a caller-supplied positive start vector.
    pub fn solve_from(&self, a: &JudgmentMatrix, start: &[f64]) -> Result<EigenReport> {
        if start.len() != a.n() {
            return Err(Error::LengthMismatch { left: start.len(), right: a.n() });
        }
        check_positive(start)?;
        let total: f64 = start.iter().sum();
        Ok(self.iterate(a, start.iter().map(|v| v / total).collect()))
    }

    fn iterate(&self, a: &JudgmentMatrix, mut v: Vec<f64>) -> EigenReport {
        let n = a.n();
        let mut next = vec![0.0; n];
        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iter {
            iterations += 1;
            mat_vec(a, &v, &mut next);
            let total: f64 = next.iter().sum();
            let mut change: f64 = 0.0;
            for (y, x) in next.iter_mut().zip(&v) {
                *y /= total;
                change = change.max((*y - x).abs());
            }
            core::mem::swap(&mut v, &mut next);
            if change < self.tol {
                converged = true;
                break;
            }
        }

        mat_vec(a, &v, &mut next);
        let lambda_max = next.iter().zip(&v).map(|(av, x)| av / x).sum::<f64>() / n as f64;
        let mu = inconsistency_index(lambda_max, n).expect("judgment matrices have n >= 2");
        EigenReport {
            lambda_max,
            ranking: rank_descending(&v),
            principal_w: v,
            mu,
            iterations,
            converged,
        }
    }
}

/// Eigenvector priorities with explicit tolerance and iteration cap.
///
/// A run that hits `max_iter` still returns its report, flagged
/// `converged = false`.
pub fn saaty_priorities(a: &JudgmentMatrix, tol: f64, max_iter: usize) -> Result<EigenReport> {
    Ok(PowerIteration::new(tol, max_iter)?.solve(a))
}

/// `(lambda_max - n) / (n - 1)`, with tiny negative values clamped to 0.
pub fn inconsistency_index(lambda_max: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::DimensionError(format!("need at least 2 alternatives, got {n}")));
    }
    let mu = (lambda_max - n as f64) / (n - 1) as f64;
    Ok(if (MU_CLAMP..0.0).contains(&mu) { 0.0 } else { mu })
}

fn mat_vec(a: &JudgmentMatrix, v: &[f64], out: &mut [f64]) {
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = a.row(i).iter().zip(v).map(|(x, y)| x * y).sum();
    }
}
