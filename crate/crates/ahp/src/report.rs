//! Result documents shared by the CLI and the HTTP service, and their
//! JSON, CSV and fixed-width table renderings.

use std::fmt::Write as _;

use ahp_core::group::{equivalence_gap, kl_divergence};
use ahp_core::lls::DEFAULT_CONSISTENCY_TOL;
use ahp_core::{
    consistency_report, group_lls_priorities, lls_priorities, ConsistencyReport, EigenReport,
    GroupJudgment, JudgmentMatrix, PowerIteration, PriorityVector,
};
use serde::{Deserialize, Serialize};

use crate::error::{AhpError, Result};

/// Default tolerance for the group equivalence check.
pub const EQUIVALENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Lls,
    Se,
    #[default]
    Both,
}

impl Method {
    pub fn wants_lls(self) -> bool {
        matches!(self, Method::Lls | Method::Both)
    }

    pub fn wants_se(self) -> bool {
        matches!(self, Method::Se | Method::Both)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Table,
}

/// Renderings other than JSON.
pub trait Tabular {
    fn to_csv(&self) -> String;
    fn to_table(&self) -> String;
}

/// Serializes a result deterministically in the requested format.
pub fn save_result<T: Serialize + Tabular>(value: &T, format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Json => {
            let mut out = serde_json::to_vec_pretty(value).expect("reports always serialize");
            out.push(b'\n');
            out
        }
        OutputFormat::Csv => value.to_csv().into_bytes(),
        OutputFormat::Table => value.to_table().into_bytes(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlsReport {
    pub priorities: PriorityVector,
    pub consistency: ConsistencyReport,
}

impl LlsReport {
    pub fn new(a: &JudgmentMatrix, consistency_tol: f64) -> Self {
        let priorities = lls_priorities(a);
        let consistency =
            consistency_report(a, &priorities, consistency_tol).expect("priorities come from the same matrix");
        Self { priorities, consistency }
    }
}

/// Single-matrix result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lls: Option<LlsReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub se: Option<EigenReport>,
}

impl SolveReport {
    pub fn new(a: &JudgmentMatrix, method: Method, consistency_tol: f64) -> Self {
        SolveReport {
            n: a.n(),
            labels: a.labels().to_vec(),
            lls: method.wants_lls().then(|| LlsReport::new(a, consistency_tol)),
            se: method.wants_se().then(|| PowerIteration::default().solve(a)),
        }
    }
}

fn label(labels: &[String], i: usize) -> String {
    labels.get(i).cloned().unwrap_or_else(|| format!("#{}", i + 1))
}

/// 1-based rank of each alternative.
fn ranks(ranking: &[usize]) -> Vec<usize> {
    let mut out = vec![0; ranking.len()];
    for (position, &index) in ranking.iter().enumerate() {
        out[index] = position + 1;
    }
    out
}

fn opt(value: Option<f64>) -> String {
    value.map_or_else(|| "n/a".to_owned(), |v| format!("{v:.6e}"))
}

impl Tabular for SolveReport {
    fn to_csv(&self) -> String {
        let mut out = String::from("index,label");
        if self.lls.is_some() {
            out.push_str(",u_lls,w_lls,rank_lls");
        }
        if self.se.is_some() {
            out.push_str(",w_se,rank_se");
        }
        out.push('\n');
        let lls_ranks = self.lls.as_ref().map(|r| ranks(&r.priorities.ranking));
        let se_ranks = self.se.as_ref().map(|r| ranks(&r.ranking));
        for i in 0..self.n {
            let _ = write!(out, "{i},{}", self.labels.get(i).map_or("", String::as_str));
            if let (Some(r), Some(rk)) = (&self.lls, &lls_ranks) {
                let _ = write!(out, ",{},{},{}", r.priorities.u[i], r.priorities.w[i], rk[i]);
            }
            if let (Some(r), Some(rk)) = (&self.se, &se_ranks) {
                let _ = write!(out, ",{},{}", r.principal_w[i], rk[i]);
            }
            out.push('\n');
        }
        out
    }

    fn to_table(&self) -> String {
        let width = (0..self.n).map(|i| label(&self.labels, i).len()).max().unwrap_or(0).max(11);
        let mut out = format!("{:<width$}", "alternative");
        if self.lls.is_some() {
            out.push_str(&format!(" {:>14} {:>5}", "w (lls)", "rank"));
        }
        if self.se.is_some() {
            out.push_str(&format!(" {:>14} {:>5}", "w (se)", "rank"));
        }
        out.push('\n');
        let lls_ranks = self.lls.as_ref().map(|r| ranks(&r.priorities.ranking));
        let se_ranks = self.se.as_ref().map(|r| ranks(&r.ranking));
        for i in 0..self.n {
            out.push_str(&format!("{:<width$}", label(&self.labels, i)));
            if let (Some(r), Some(rk)) = (&self.lls, &lls_ranks) {
                out.push_str(&format!(" {:>14.10} {:>5}", r.priorities.w[i], rk[i]));
            }
            if let (Some(r), Some(rk)) = (&self.se, &se_ranks) {
                out.push_str(&format!(" {:>14.10} {:>5}", r.principal_w[i], rk[i]));
            }
            out.push('\n');
        }
        if let Some(r) = &self.lls {
            let _ = writeln!(
                out,
                "lls: sigma2 = {}, distance = {:.6e}, consistent = {}",
                opt(r.consistency.sigma2),
                r.consistency.distance,
                r.consistency.is_consistent
            );
        }
        if let Some(r) = &self.se {
            let _ = writeln!(
                out,
                "se: lambda_max = {:.10}, mu = {:.6e}, iterations = {}, converged = {}",
                r.lambda_max, r.mu, r.iterations, r.converged
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpertReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub alpha: f64,
    pub priorities: PriorityVector,
    pub consistency: ConsistencyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub tol: f64,
    pub max_abs_diff: f64,
    pub passed: bool,
}

/// Group result with per-expert diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub n: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
    pub alphas: Vec<f64>,
    pub group_w: PriorityVector,
    pub experts: Vec<ExpertReport>,
    /// `D(u || u^(m))` between unnormalized vectors.
    pub divergences: Vec<f64>,
    /// The same divergence between normalized vectors, for display.
    pub normalized_divergences: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kl_verification: Option<EquivalenceReport>,
}

impl GroupReport {
    /// `names`, when given, must have one entry per expert.
    pub fn new(
        g: &GroupJudgment,
        names: Option<&[String]>,
        consistency_tol: f64,
        verify: Option<f64>,
    ) -> Self {
        let result = group_lls_priorities(g);
        let experts = g
            .matrices()
            .iter()
            .zip(g.alphas())
            .zip(&result.expert_vectors)
            .enumerate()
            .map(|(m, ((a, &alpha), p))| ExpertReport {
                name: names.map(|n| n[m].clone()),
                alpha,
                priorities: p.clone(),
                consistency: consistency_report(a, p, consistency_tol).expect("same matrix"),
            })
            .collect();
        let normalized_divergences = result
            .expert_vectors
            .iter()
            .map(|p| kl_divergence(&result.group_w.w, &p.w).expect("positive vectors"))
            .collect();
        let kl_verification = verify.map(|tol| {
            let gap = equivalence_gap(g);
            EquivalenceReport { tol, max_abs_diff: gap, passed: gap <= tol }
        });
        GroupReport {
            n: g.n(),
            m: g.m(),
            labels: g.matrices()[0].labels().to_vec(),
            alphas: g.alphas().to_vec(),
            group_w: result.group_w,
            experts,
            divergences: result.divergences,
            normalized_divergences,
            kl_verification,
        }
    }
}

impl Tabular for GroupReport {
    fn to_csv(&self) -> String {
        let mut out = String::from("index,label,u_group,w_group,rank_group");
        for m in 0..self.m {
            let _ = write!(out, ",w_expert{m}");
        }
        out.push('\n');
        let rk = ranks(&self.group_w.ranking);
        for i in 0..self.n {
            let _ = write!(
                out,
                "{i},{},{},{},{}",
                self.labels.get(i).map_or("", String::as_str),
                self.group_w.u[i],
                self.group_w.w[i],
                rk[i]
            );
            for e in &self.experts {
                let _ = write!(out, ",{}", e.priorities.w[i]);
            }
            out.push('\n');
        }
        out
    }

    fn to_table(&self) -> String {
        let width = (0..self.n).map(|i| label(&self.labels, i).len()).max().unwrap_or(0).max(11);
        let mut out = format!("{:<width$} {:>14} {:>5}", "alternative", "w (group)", "rank");
        for m in 0..self.m {
            out.push_str(&format!(" {:>14}", format!("w (expert {m})")));
        }
        out.push('\n');
        let rk = ranks(&self.group_w.ranking);
        for i in 0..self.n {
            out.push_str(&format!(
                "{:<width$} {:>14.10} {:>5}",
                label(&self.labels, i),
                self.group_w.w[i],
                rk[i]
            ));
            for e in &self.experts {
                out.push_str(&format!(" {:>14.10}", e.priorities.w[i]));
            }
            out.push('\n');
        }
        for (m, e) in self.experts.iter().enumerate() {
            let _ = writeln!(
                out,
                "expert {m}: alpha = {:.6}, sigma2 = {}, divergence = {:.6e}",
                e.alpha,
                opt(e.consistency.sigma2),
                self.divergences[m]
            );
        }
        if let Some(v) = &self.kl_verification {
            let _ = writeln!(
                out,
                "kl equivalence: {} (max diff {:.3e}, tol {:.1e})",
                if v.passed { "pass" } else { "FAIL" },
                v.max_abs_diff,
                v.tol
            );
        }
        out
    }
}

/// Builds a validated group from matrices and raw weights.
pub fn build_group(matrices: Vec<JudgmentMatrix>, weights: Option<Vec<f64>>) -> Result<GroupJudgment> {
    if matrices.is_empty() {
        return Err(AhpError::Invalid("at least one expert matrix is required".into()));
    }
    let weights = weights.unwrap_or_else(|| vec![1.0 / matrices.len() as f64; matrices.len()]);
    if weights.len() != matrices.len() {
        return Err(AhpError::Invalid(format!(
            "{} matrices but {} weights",
            matrices.len(),
            weights.len()
        )));
    }
    Ok(GroupJudgment::new(matrices, weights)?)
}

pub fn default_consistency_tol() -> f64 {
    DEFAULT_CONSISTENCY_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use ahp_core::ScaleMode;

    fn inconsistent3() -> JudgmentMatrix {
        JudgmentMatrix::from_upper(3, &[(0, 1, 2.0), (0, 2, 4.0), (1, 2, 3.0)], ScaleMode::FreePositive)
            .unwrap()
    }

    #[test]
    fn uniform_weights_print_shortest_repr() {
        let a = JudgmentMatrix::from_rows(&vec![vec![1.0; 3]; 3], ScaleMode::FreePositive).unwrap();
        let json = String::from_utf8(save_result(&SolveReport::new(&a, Method::Lls, 1e-9), OutputFormat::Json))
            .unwrap();
        assert!(json.contains("0.3333333333333333"));
    }

    #[test]
    fn json_round_trips() {
        let report = SolveReport::new(&inconsistent3(), Method::Both, 1e-9);
        let bytes = save_result(&report, OutputFormat::Json);
        let back: SolveReport = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn table_has_one_row_per_alternative() {
        let report = SolveReport::new(&inconsistent3(), Method::Both, 1e-9);
        let table = report.to_table();
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 1 + 3 + 2);
        assert!(lines[0].contains("rank"));
        let widths: Vec<usize> = lines[..4].iter().map(|l| l.len()).collect();
        assert!(widths.iter().all(|&w| w == widths[0]));
        assert!(lines[1].starts_with("#1"));
        assert!(lines[1].trim_end().ends_with('1'));
    }

    #[test]
    fn csv_layout() {
        let csv = SolveReport::new(&inconsistent3(), Method::Lls, 1e-9).to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("index,label,u_lls,w_lls,rank_lls"));
        assert!(lines.next().unwrap().starts_with("0,,2,"));
    }

    #[test]
    fn group_report_contents() {
        let e1 = JudgmentMatrix::from_upper(2, &[(0, 1, 2.0)], ScaleMode::FreePositive).unwrap();
        let e2 = JudgmentMatrix::from_upper(2, &[(0, 1, 8.0)], ScaleMode::FreePositive).unwrap();
        let g = build_group(vec![e1, e2], Some(vec![0.5, 0.5])).unwrap();
        let r = GroupReport::new(&g, None, 1e-9, Some(EQUIVALENCE_TOL));
        assert!((r.group_w.w[0] - 0.8).abs() < 1e-15);
        assert!(r.kl_verification.as_ref().unwrap().passed);
        assert_eq!(r.experts[0].consistency.sigma2, None);
        let json = String::from_utf8(save_result(&r, OutputFormat::Json)).unwrap();
        for key in ["group_w", "experts", "divergences", "sigma2"] {
            assert!(json.contains(key), "{key}");
        }
        assert_eq!(r.to_csv().lines().count(), 3);
        assert!(r.to_table().contains("kl equivalence: pass"));
    }

    #[test]
    fn group_weight_count_must_match() {
        let e = JudgmentMatrix::from_upper(2, &[(0, 1, 2.0)], ScaleMode::FreePositive).unwrap();
        assert!(matches!(build_group(vec![e.clone()], Some(vec![0.5, 0.5])), Err(AhpError::Invalid(_))));
        assert!(build_group(vec![e.clone(), e], None).is_ok());
        assert!(matches!(build_group(vec![], None), Err(AhpError::Invalid(_))));
    }
}
