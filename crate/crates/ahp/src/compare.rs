//! Side-by-side LLS and eigenvector results, with an optional Monte Carlo
//! error study on perturbed consistent matrices.

use std::fmt::Write as _;

use ahp_core::{lls_priorities, JudgmentMatrix, PowerIteration};
use serde::{Deserialize, Serialize};

use crate::report::{LlsReport, Tabular};
use crate::sampling::{perturb_consistent, trial_rng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationSettings {
    pub trials: u64,
    pub noise: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub mean: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Simulation {
    pub trials: u64,
    pub noise: f64,
    pub seed: u64,
    /// Max-norm of `ln(w_est / w_true)`.
    pub lls_error: ErrorStats,
    pub se_error: ErrorStats,
    /// Fraction of trials where the LLS error did not exceed the SE error.
    pub lls_not_worse_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
    pub w_lls: Vec<f64>,
    pub w_se: Vec<f64>,
    pub ranking_lls: Vec<usize>,
    pub ranking_se: Vec<usize>,
    pub rankings_agree: bool,
    pub sigma2: Option<f64>,
    pub mu: f64,
    /// Max-norm of `ln(w_se / w_lls)`.
    pub log_gap: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<Simulation>,
}

/// Max-norm of `ln(estimate / truth)` after normalizing both.
pub fn log_error(estimate: &[f64], truth: &[f64]) -> f64 {
    let se: f64 = estimate.iter().sum();
    let st: f64 = truth.iter().sum();
    estimate
        .iter()
        .zip(truth)
        .map(|(e, t)| ((e / se) / (t / st)).ln().abs())
        .fold(0.0, f64::max)
}

pub fn simulate(u: &[f64], settings: SimulationSettings) -> Simulation {
    let solver = PowerIteration::default();
    let (mut lls_sum, mut lls_max, mut se_sum, mut se_max, mut wins) = (0.0, 0.0f64, 0.0, 0.0f64, 0u64);
    for trial in 0..settings.trials {
        let a = perturb_consistent(u, settings.noise, &mut trial_rng(settings.seed, trial));
        let lls = log_error(&lls_priorities(&a).w, u);
        let se = log_error(&solver.solve(&a).principal_w, u);
        lls_sum += lls;
        se_sum += se;
        lls_max = lls_max.max(lls);
        se_max = se_max.max(se);
        if lls <= se {
            wins += 1;
        }
    }
    let t = settings.trials.max(1) as f64;
    Simulation {
        trials: settings.trials,
        noise: settings.noise,
        seed: settings.seed,
        lls_error: ErrorStats { mean: lls_sum / t, max: lls_max },
        se_error: ErrorStats { mean: se_sum / t, max: se_max },
        lls_not_worse_fraction: wins as f64 / t,
    }
}

impl CompareReport {
    pub fn new(a: &JudgmentMatrix, consistency_tol: f64, simulation: Option<SimulationSettings>) -> Self {
        let lls = LlsReport::new(a, consistency_tol);
        let se = PowerIteration::default().solve(a);
        CompareReport {
            n: a.n(),
            labels: a.labels().to_vec(),
            rankings_agree: lls.priorities.ranking == se.ranking,
            log_gap: log_error(&se.principal_w, &lls.priorities.w),
            simulation: simulation.map(|s| simulate(&lls.priorities.u, s)),
            w_lls: lls.priorities.w,
            w_se: se.principal_w,
            ranking_lls: lls.priorities.ranking,
            ranking_se: se.ranking,
            sigma2: lls.consistency.sigma2,
            mu: se.mu,
        }
    }
}

impl Tabular for CompareReport {
    fn to_csv(&self) -> String {
        let mut out = String::from("index,label,w_lls,w_se\n");
        for i in 0..self.n {
            let label = self.labels.get(i).map_or("", String::as_str);
            let _ = writeln!(out, "{i},{label},{},{}", self.w_lls[i], self.w_se[i]);
        }
        out
    }

    fn to_table(&self) -> String {
        let width = self.labels.iter().map(String::len).max().unwrap_or(0).max(11);
        let mut out = format!("{:<width$} {:>14} {:>14}\n", "alternative", "w (lls)", "w (se)");
        for i in 0..self.n {
            let label = self.labels.get(i).cloned().unwrap_or_else(|| format!("#{}", i + 1));
            let _ = writeln!(out, "{label:<width$} {:>14.10} {:>14.10}", self.w_lls[i], self.w_se[i]);
        }
        let _ = writeln!(
            out,
            "rankings agree: {}, max |ln(w_se / w_lls)| = {:.6e}",
            if self.rankings_agree { "yes" } else { "no" },
            self.log_gap
        );
        let sigma2 = self.sigma2.map_or_else(|| "n/a".to_owned(), |s| format!("{s:.6e}"));
        let _ = writeln!(out, "sigma2 = {sigma2}, mu = {:.6e}", self.mu);
        if let Some(s) = &self.simulation {
            let _ = writeln!(out, "simulation: {} trials, noise {}, seed {}", s.trials, s.noise, s.seed);
            let _ = writeln!(out, "{:<6} {:>14} {:>14}", "method", "mean error", "max error");
            let _ = writeln!(out, "{:<6} {:>14.6e} {:>14.6e}", "lls", s.lls_error.mean, s.lls_error.max);
            let _ = writeln!(out, "{:<6} {:>14.6e} {:>14.6e}", "se", s.se_error.mean, s.se_error.max);
            let _ = writeln!(out, "lls error <= se error in {:.1}% of trials", 100.0 * s.lls_not_worse_fraction);
        }
        out
    }
}
