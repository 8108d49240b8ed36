//! Weighted aggregation of several experts.
//!
//! The group least squares solution is `x_k = sum_m alpha_m x_k^(m)`, where
//! `x^(m)` are the per-expert log priorities, i.e. a weighted geometric mean
//! of the expert vectors. The same vector minimizes the weighted sum of
//! generalized Kullback-Leibler divergences `sum_m alpha_m D(u || u^(m))`;
//! [`verify_equivalence`] computes both routes and compares them.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lls::{log_priorities, lls_priorities};
use crate::math::{exp, ln, normalize, pow};
use crate::matrix::JudgmentMatrix;
use crate::priority::{check_positive, PriorityVector};

/// Weights whose sum is within this of 1 are silently renormalized.
pub const WEIGHT_SUM_TOL: f64 = 1e-6;

/// Checks that weights are positive and sum to 1 up to [`WEIGHT_SUM_TOL`], then renormalizes.
pub fn normalize_weights(alphas: &[f64]) -> Result<Vec<f64>> {
    if alphas.is_empty() {
        return Err(Error::WeightError(String::from("at least one expert weight is required")));
    }
    if let Some((m, a)) = alphas.iter().enumerate().find(|(_, a)| !(**a > 0.0 && a.is_finite())) {
        return Err(Error::WeightError(format!("weight {m} must be positive, got {a}")));
    }
    let total: f64 = alphas.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::WeightError(format!("weights sum to {total}, expected 1")));
    }
    if total == 1.0 {
        Ok(alphas.to_vec())
    } else {
        Ok(alphas.iter().map(|a| a / total).collect())
    }
}

/// `M` expert matrices over the same alternatives with normalized weights.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupJudgment {
    matrices: Vec<JudgmentMatrix>,
    alphas: Vec<f64>,
}

impl GroupJudgment {
    pub fn new(matrices: Vec<JudgmentMatrix>, alphas: Vec<f64>) -> Result<Self> {
        if matrices.len() != alphas.len() {
            return Err(Error::LengthMismatch { left: matrices.len(), right: alphas.len() });
        }
        let alphas = normalize_weights(&alphas)?;
        let expected = matrices[0].n();
        if let Some((expert, a)) = matrices.iter().enumerate().find(|(_, a)| a.n() != expected) {
            return Err(Error::MismatchedDimensions { expected, expert, found: a.n() });
        }
        Ok(Self { matrices, alphas })
    }

    pub fn m(&self) -> usize {
        self.matrices.len()
    }

    pub fn n(&self) -> usize {
        self.matrices[0].n()
    }

    pub fn matrices(&self) -> &[JudgmentMatrix] {
        &self.matrices
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroupResult {
    pub group_w: PriorityVector,
    pub expert_vectors: Vec<PriorityVector>,
    /// `D(u || u^(m))` on unnormalized vectors at the group optimum.
    pub divergences: Vec<f64>,
}

/// Weighted group least squares priorities.
///
/// Experts are combined in input order, so the output is bit-stable for a
/// given input. A single expert reproduces [`lls_priorities`] exactly.
pub fn group_lls_priorities(g: &GroupJudgment) -> GroupResult {
    let n = g.n();
    let mut x = alloc::vec![0.0; n];
    for (a, &alpha) in g.matrices.iter().zip(&g.alphas) {
        for (acc, xm) in x.iter_mut().zip(log_priorities(a)) {
            *acc += alpha * xm;
        }
    }
    let group_w = PriorityVector::from_unnormalized(x.into_iter().map(exp).collect())
        .expect("exponentials are positive");
    let expert_vectors: Vec<PriorityVector> = g.matrices.iter().map(lls_priorities).collect();
    let divergences = expert_vectors
        .iter()
        .map(|e| kl_divergence(&group_w.u, &e.u).expect("positive vectors of equal length"))
        .collect();
    GroupResult { group_w, expert_vectors, divergences }
}

/// Generalized Kullback-Leibler divergence `sum u ln(u/v) - sum u + sum v`.
pub fn kl_divergence(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch { left: u.len(), right: v.len() });
    }
    check_positive(u)?;
    check_positive(v)?;
    let cross: f64 = u.iter().zip(v).map(|(&a, &b)| a * (ln(a) - ln(b))).sum();
    let su: f64 = u.iter().sum();
    let sv: f64 = v.iter().sum();
    Ok(cross - su + sv)
}

/// `sum_m alpha_m D(u || v^(m))`.
pub fn weighted_divergence(u: &[f64], vectors: &[Vec<f64>], alphas: &[f64]) -> Result<f64> {
    if vectors.len() != alphas.len() {
        return Err(Error::LengthMismatch { left: vectors.len(), right: alphas.len() });
    }
    let mut total = 0.0;
    for (v, &alpha) in vectors.iter().zip(alphas) {
        total += alpha * kl_divergence(u, v)?;
    }
    Ok(total)
}

/// The minimizer of [`weighted_divergence`]: `u_k = prod_m (v_k^(m))^alpha_m`.
pub fn kl_aggregate(vectors: &[Vec<f64>], alphas: &[f64]) -> Result<Vec<f64>> {
    if vectors.len() != alphas.len() {
        return Err(Error::LengthMismatch { left: vectors.len(), right: alphas.len() });
    }
    let alphas = normalize_weights(alphas)?;
    let n = vectors[0].len();
    let mut u = alloc::vec![1.0; n];
    for (v, &alpha) in vectors.iter().zip(&alphas) {
        if v.len() != n {
            return Err(Error::LengthMismatch { left: v.len(), right: n });
        }
        check_positive(v)?;
        for (acc, &component) in u.iter_mut().zip(v) {
            *acc *= pow(component, alpha);
        }
    }
    Ok(u)
}

/// Largest componentwise gap between the group least squares priorities and
/// the normalized divergence minimizer over the per-expert vectors.
pub fn equivalence_gap(g: &GroupJudgment) -> f64 {
    let lls = group_lls_priorities(g);
    let experts: Vec<Vec<f64>> = lls.expert_vectors.iter().map(|p| p.u.clone()).collect();
    let kl = kl_aggregate(&experts, &g.alphas).expect("validated group");
    let kl_w = normalize(&kl);
    lls.group_w
        .w
        .iter()
        .zip(&kl_w)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// True when both aggregation routes agree within `tol` componentwise.
pub fn verify_equivalence(g: &GroupJudgment, tol: f64) -> bool {
    equivalence_gap(g) <= tol
}
