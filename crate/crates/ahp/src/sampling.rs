//! Random judgment matrices for simulation.

use ahp_core::{JudgmentMatrix, ScaleMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Independent stream for one trial: `seed + trial`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial))
}

/// Priorities with components log-uniform in `[0.1, 10]`.
pub fn random_priorities<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let bound = 10f64.ln();
    (0..n).map(|_| rng.random_range(-bound..=bound).exp()).collect()
}

/// `a_ij = u_i / u_j * exp(e_ij)` on the upper triangle with
/// `e_ij ~ Normal(0, noise)`, reciprocal-completed.
pub fn perturb_consistent<R: Rng>(u: &[f64], noise: f64, rng: &mut R) -> JudgmentMatrix {
    let n = u.len();
    let normal = Normal::new(0.0, noise).expect("noise is finite and non-negative");
    let mut upper = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let e = if noise > 0.0 { normal.sample(rng) } else { 0.0 };
            upper.push((i, j, u[i] / u[j] * e.exp()));
        }
    }
    JudgmentMatrix::from_upper(n, &upper, ScaleMode::FreePositive).expect("entries are positive")
}
