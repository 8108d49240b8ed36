use ahp_core::eigen::PowerIteration;
use ahp_core::group::{equivalence_gap, weighted_divergence};
use ahp_core::lls::{log_priorities, DEFAULT_CONSISTENCY_TOL};
use ahp_core::oracle::{lls_objective, min_norm_log_solution};
use ahp_core::{
    consistency_report, group_lls_priorities, kl_aggregate, lls_linear_system_oracle,
    lls_priorities, GroupJudgment, JudgmentMatrix,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Consistent base `u_i / u_j` (log-uniform components in [0.1, 10]) with
/// reciprocal log-normal noise on the upper triangle.
fn perturbed(n: usize, noise: f64, seed: u64) -> (Vec<f64>, JudgmentMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.random_range(-1.0..=1.0))).collect();
    let normal = Normal::new(0.0, noise.max(f64::MIN_POSITIVE)).unwrap();
    let mut judgments = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let eps = if noise > 0.0 { normal.sample(&mut rng).exp() } else { 1.0 };
            judgments.push((i, j, u[i] / u[j] * eps));
        }
    }
    let a = JudgmentMatrix::from_upper(n, &judgments, Default::default()).unwrap();
    (u, a)
}

fn matrix_strategy(sizes: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = JudgmentMatrix> {
    (sizes, prop::sample::select(vec![0.01, 0.1, 0.5]), any::<u64>())
        .prop_map(|(n, noise, seed)| perturbed(n, noise, seed).1)
}

fn central_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], step: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|k| {
            let h = step(x[k]);
            probe[k] = x[k] + h;
            let up = f(&probe);
            probe[k] = x[k] - h;
            let down = f(&probe);
            probe[k] = x[k];
            (up - down) / (2.0 * h)
        })
        .collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn consistent_matrices_are_recovered(n in 2usize..=12, seed in any::<u64>()) {
        let (u, a) = perturbed(n, 0.0, seed);
        let total: f64 = u.iter().sum();
        let p = lls_priorities(&a);
        for (w, ui) in p.w.iter().zip(&u) {
            prop_assert!((w - ui / total).abs() <= 1e-12);
        }
        let se = PowerIteration::default().solve(&a);
        prop_assert!((se.lambda_max - n as f64).abs() <= 1e-8);
        prop_assert!(max_abs_diff(&se.principal_w, &p.w) <= 1e-8);
    }

    #[test]
    fn closed_form_matches_linear_system(a in matrix_strategy(3..=12)) {
        let closed = lls_priorities(&a);
        let oracle = lls_linear_system_oracle(&a);
        for (c, o) in closed.w.iter().zip(&oracle.w) {
            prop_assert!((c - o).abs() <= 1e-10 * c);
        }
        prop_assert!(min_norm_log_solution(&a).iter().sum::<f64>().abs() <= 1e-10);
        let product: f64 = closed.u.iter().product();
        prop_assert!((product - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn closed_form_is_stationary_and_minimal(a in matrix_strategy(2..=12), seed in any::<u64>()) {
        let x = log_priorities(&a);
        let s = |y: &[f64]| lls_objective(&a, y);
        let grad = central_gradient(s, &x, |_| 1e-4);
        prop_assert!(grad.iter().all(|g| g.abs() <= 1e-6), "gradient {grad:?}");

        let best = s(&x);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..100 {
            let eta: Vec<f64> = (0..x.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = eta.iter().map(|e| e * e).sum::<f64>().sqrt();
            let radius = rng.random_range(0.0..0.1);
            let moved: Vec<f64> = x.iter().zip(&eta).map(|(xi, e)| xi + e / norm * radius).collect();
            prop_assert!(best <= s(&moved));
        }
    }

    #[test]
    fn distance_and_sigma2_agree(a in matrix_strategy(3..=12)) {
        let r = consistency_report(&a, &lls_priorities(&a), DEFAULT_CONSISTENCY_TOL).unwrap();
        let n = a.n() as f64;
        let sigma2 = r.sigma2.unwrap();
        let lhs = r.distance * r.distance;
        prop_assert!((lhs - (n - 1.0) * (n - 2.0) * sigma2).abs() <= 1e-10 * lhs.max(f64::MIN_POSITIVE));
        let sum_sq: f64 = r.residuals.iter().flatten().map(|d| d * d).sum();
        prop_assert!((lhs - sum_sq).abs() <= 1e-10 * lhs);
        for i in 0..a.n() {
            for j in 0..a.n() {
                prop_assert!((r.residuals[i][j] + r.residuals[j][i]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn permutation_equivariance(a in matrix_strategy(2..=12), seed in any::<u64>()) {
        let n = a.n();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..n).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let base = lls_priorities(&a);
        let permuted = lls_priorities(&a.permuted(&perm).unwrap());
        for i in 0..n {
            prop_assert!((permuted.w[i] - base.w[perm[i]]).abs() <= 1e-12);
        }
    }

    #[test]
    fn reciprocal_input_inverts_priorities(a in matrix_strategy(2..=12)) {
        let base = lls_priorities(&a);
        let inverted = lls_priorities(&a.reciprocal());
        let inv_u: Vec<f64> = base.u.iter().map(|u| 1.0 / u).collect();
        let total: f64 = inv_u.iter().sum();
        for (w, iu) in inverted.w.iter().zip(&inv_u) {
            prop_assert!((w - iu / total).abs() <= 1e-12);
        }
    }

    #[test]
    fn upper_triangle_reconstruction_is_identical(a in matrix_strategy(2..=12)) {
        let rebuilt = JudgmentMatrix::from_upper(a.n(), &a.upper_judgments(), a.scale_mode()).unwrap();
        prop_assert_eq!(lls_priorities(&rebuilt), lls_priorities(&a));
    }

    #[test]
    fn perron_eigenvalue_is_at_least_n(a in matrix_strategy(2..=12)) {
        let r = PowerIteration::default().solve(&a);
        prop_assert!(r.converged);
        prop_assert!(r.lambda_max >= a.n() as f64 - 1e-8);
        prop_assert!(r.mu >= -1e-8);
        prop_assert!((r.principal_w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(r.principal_w.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn power_iteration_ignores_start(a in matrix_strategy(2..=12), seed in any::<u64>()) {
        let solver = PowerIteration::default();
        let reference = solver.solve(&a);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..5 {
            let start: Vec<f64> = (0..a.n()).map(|_| rng.random_range(0.01..1.0)).collect();
            let r = solver.solve_from(&a, &start).unwrap();
            prop_assert!(max_abs_diff(&r.principal_w, &reference.principal_w) <= 1e-8);
            prop_assert!((r.lambda_max - reference.lambda_max).abs() <= 1e-8);
        }
    }

    #[test]
    fn mild_noise_keeps_rankings_aligned(n in 3usize..=10, seed in any::<u64>(), noise in 0.0..=0.05) {
        // well separated base: consecutive log priorities differ by 0.3
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let u: Vec<f64> = order.iter().map(|&r| (0.3 * r as f64).exp()).collect();
        let normal = Normal::new(0.0, f64::max(noise, 1e-300)).unwrap();
        let mut judgments = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                judgments.push((i, j, u[i] / u[j] * normal.sample(&mut rng).exp()));
            }
        }
        let a = JudgmentMatrix::from_upper(n, &judgments, Default::default()).unwrap();
        prop_assert_eq!(PowerIteration::default().solve(&a).ranking, lls_priorities(&a).ranking);
    }
}

fn group_strategy() -> impl Strategy<Value = GroupJudgment> {
    (1usize..=6, 2usize..=10, any::<u64>()).prop_map(|(m, n, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let alphas = raw.iter().map(|a| a / total).collect();
        let matrices = (0..m)
            .map(|k| perturbed(n, [0.01, 0.1, 0.5][k % 3], rng.random()).1)
            .collect();
        GroupJudgment::new(matrices, alphas).unwrap()
    })
}

proptest! {
    #[test]
    fn group_routes_agree(g in group_strategy()) {
        prop_assert!(equivalence_gap(&g) <= 1e-9);
        let r = group_lls_priorities(&g);
        prop_assert!(r.divergences.iter().all(|&d| d >= 0.0));
        prop_assert!((r.group_w.w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn kl_minimizer_is_stationary_and_minimal(g in group_strategy(), seed in any::<u64>()) {
        let r = group_lls_priorities(&g);
        let experts: Vec<Vec<f64>> = r.expert_vectors.iter().map(|p| p.u.clone()).collect();
        let u = kl_aggregate(&experts, g.alphas()).unwrap();
        let objective = |v: &[f64]| weighted_divergence(v, &experts, g.alphas()).unwrap();
        let grad = central_gradient(objective, &u, |x| 1e-5 * x);
        prop_assert!(grad.iter().all(|d| d.abs() <= 1e-6), "gradient {grad:?}");

        let best = objective(&u);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..100 {
            let moved: Vec<f64> = u.iter().map(|x| x * rng.random_range(-0.1f64..=0.1).exp()).collect();
            prop_assert!(best <= objective(&moved));
        }
    }

    #[test]
    fn group_is_continuous_in_weights(g in group_strategy(), expert in any::<prop::sample::Index>()) {
        let delta = 1e-6;
        let mut alphas = g.alphas().to_vec();
        alphas[expert.index(g.m())] += delta;
        let total: f64 = alphas.iter().sum();
        let alphas: Vec<f64> = alphas.iter().map(|a| a / total).collect();
        let nudged = GroupJudgment::new(g.matrices().to_vec(), alphas).unwrap();
        let a = group_lls_priorities(&g).group_w.w;
        let b = group_lls_priorities(&nudged).group_w.w;
        prop_assert!(max_abs_diff(&a, &b) <= 1e-4);
    }

    #[test]
    fn expert_order_does_not_matter(g in group_strategy()) {
        let reversed = GroupJudgment::new(
            g.matrices().iter().rev().cloned().collect(),
            g.alphas().iter().rev().copied().collect(),
        )
        .unwrap();
        let a = group_lls_priorities(&g).group_w.w;
        let b = group_lls_priorities(&reversed).group_w.w;
        prop_assert!(max_abs_diff(&a, &b) <= 1e-12);
    }
}
