use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Lower bound of the 1/9..9 comparison scale.
pub const SAATY_MIN: f64 = 1.0 / 9.0;
/// Upper bound of the 1/9..9 comparison scale.
pub const SAATY_MAX: f64 = 9.0;
/// Largest accepted deviation of `a_ij * a_ji` from 1 when both triangles are supplied.
pub const RECIPROCITY_TOL: f64 = 1e-12;

/// Which values a judgment may take.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum ScaleMode {
    /// Every entry must lie in `[1/9, 9]`.
    StrictSaaty,
    /// Any positive finite ratio.
    #[default]
    FreePositive,
}

impl ScaleMode {
    pub(crate) fn check(self, row: usize, col: usize, value: f64) -> Result<()> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::NonPositiveEntry { row, col, value });
        }
        if self == ScaleMode::StrictSaaty && !(SAATY_MIN..=SAATY_MAX).contains(&value) {
            return Err(Error::ScaleViolation { row, col, value });
        }
        Ok(())
    }
}

/// A validated positive reciprocal `N x N` pairwise comparison matrix.
///
/// Entry `(i, j)` is the strength of alternative `i` over alternative `j`.
/// The diagonal is exactly one and `a_ji` equals `1 / a_ij` up to
/// [`RECIPROCITY_TOL`]. Entries are stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct JudgmentMatrix {
    n: usize,
    entries: Vec<f64>,
    labels: Vec<String>,
    scale_mode: ScaleMode,
}

impl JudgmentMatrix {
    /// Validates a fully specified square matrix.
    ///
    /// The diagonal is forced to 1. The lower triangle is stored as the exact
    /// reciprocal of the upper one once the supplied pair passes the
    /// reciprocity check, so equal upper triangles give bit-identical matrices
    /// regardless of where they came from.
    pub fn from_rows(rows: &[Vec<f64>], scale_mode: ScaleMode) -> Result<Self> {
        let optional: Vec<Vec<Option<f64>>> = rows
            .iter()
            .map(|row| row.iter().copied().map(Some).collect())
            .collect();
        Self::from_optional_rows(&optional, scale_mode)
    }

    /// Validates a square matrix where some entries may be absent.
    ///
    /// Diagonal entries are ignored. For each pair `i < j` at least one of
    /// `(i, j)` and `(j, i)` must be present; an absent entry is filled with
    /// the reciprocal of its mirror.
    pub fn from_optional_rows(rows: &[Vec<Option<f64>>], scale_mode: ScaleMode) -> Result<Self> {
        let n = rows.len();
        check_size(n)?;
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != n) {
            return Err(Error::DimensionError(format!(
                "row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        let mut entries = vec![1.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let upper = match (rows[i][j], rows[j][i]) {
                    (Some(a), Some(b)) => {
                        scale_mode.check(i, j, a)?;
                        scale_mode.check(j, i, b)?;
                        let product = a * b;
                        if (product - 1.0).abs() > RECIPROCITY_TOL {
                            return Err(Error::ReciprocityViolation { row: i, col: j, product });
                        }
                        a
                    }
                    (Some(a), None) => {
                        scale_mode.check(i, j, a)?;
                        a
                    }
                    (None, Some(b)) => {
                        scale_mode.check(j, i, b)?;
                        1.0 / b
                    }
                    (None, None) => return Err(Error::MissingJudgment { row: i, col: j }),
                };
                entries[i * n + j] = upper;
                entries[j * n + i] = 1.0 / upper;
            }
        }
        Ok(Self { n, entries, labels: Vec::new(), scale_mode })
    }

    /// Builds a matrix from its `N(N-1)/2` upper-triangle judgments `(i, j, a_ij)`, `i < j`.
    pub fn from_upper(n: usize, judgments: &[(usize, usize, f64)], scale_mode: ScaleMode) -> Result<Self> {
        check_size(n)?;
        let mut rows = vec![vec![None; n]; n];
        for &(i, j, value) in judgments {
            if i >= n || j >= n {
                return Err(Error::InvalidPosition { row: i, col: j, reason: "index out of range" });
            }
            if i >= j {
                return Err(Error::InvalidPosition { row: i, col: j, reason: "expected i < j" });
            }
            if rows[i][j].is_some() {
                return Err(Error::InvalidPosition { row: i, col: j, reason: "duplicate judgment" });
            }
            rows[i][j] = Some(value);
        }
        Self::from_optional_rows(&rows, scale_mode)
    }

    /// The consistent matrix `a_ij = u_i / u_j` for a positive vector `u`.
    pub fn from_priorities(u: &[f64]) -> Result<Self> {
        check_size(u.len())?;
        for (index, &value) in u.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::NonPositiveComponent { index, value });
            }
        }
        let n = u.len();
        let mut entries = vec![1.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let upper = u[i] / u[j];
                entries[i * n + j] = upper;
                entries[j * n + i] = 1.0 / upper;
            }
        }
        Ok(Self { n, entries, labels: Vec::new(), scale_mode: ScaleMode::FreePositive })
    }

    /// Completes a consistent matrix from its first row via `a_ik = a_1k / a_1i`.
    pub fn consistent_completion(first_row: &[f64]) -> Result<Self> {
        check_size(first_row.len())?;
        for (col, &value) in first_row.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::NonPositiveEntry { row: 0, col, value });
            }
        }
        if first_row[0] != 1.0 {
            return Err(Error::FirstEntryNotOne(first_row[0]));
        }
        let n = first_row.len();
        let mut entries = vec![1.0; n * n];
        for i in 0..n {
            for k in (i + 1)..n {
                let upper = first_row[k] / first_row[i];
                entries[i * n + k] = upper;
                entries[k * n + i] = 1.0 / upper;
            }
        }
        Ok(Self { n, entries, labels: Vec::new(), scale_mode: ScaleMode::FreePositive })
    }

    /// Attaches alternative names. An empty list clears them.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if !labels.is_empty() && labels.len() != self.n {
            return Err(Error::DimensionError(format!(
                "{} labels for {} alternatives",
                labels.len(),
                self.n
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// The upper-triangle judgments `(i, j, a_ij)` with `i < j`, row by row.
    pub fn upper_judgments(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.n * (self.n - 1) / 2);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                out.push((i, j, self.get(i, j)));
            }
        }
        out
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn scale_mode(&self) -> ScaleMode {
        self.scale_mode
    }

    /// True iff `|a_ik - a_ij a_jk| <= tol * a_ik` for every triple.
    pub fn is_consistent_exact(&self, tol: f64) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            (0..n).all(|j| {
                (0..n).all(|k| {
                    let direct = self.get(i, k);
                    (direct - self.get(i, j) * self.get(j, k)).abs() <= tol * direct
                })
            })
        })
    }

    /// Relabels alternatives: entry `(i, j)` of the result is `a[perm[i]][perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n;
        if perm.len() != n {
            return Err(Error::LengthMismatch { left: perm.len(), right: n });
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::DimensionError(String::from("not a permutation")));
            }
            seen[p] = true;
        }
        let mut entries = vec![1.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = self.get(perm[i], perm[j]);
            }
        }
        let labels = if self.labels.is_empty() {
            Vec::new()
        } else {
            perm.iter().map(|&p| self.labels[p].clone()).collect()
        };
        Ok(Self { n, entries, labels, scale_mode: self.scale_mode })
    }

    /// The elementwise reciprocal, which for a reciprocal matrix is its transpose.
    pub fn reciprocal(&self) -> Self {
        let n = self.n;
        let mut entries = vec![1.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = self.get(j, i);
            }
        }
        Self { n, entries, labels: self.labels.clone(), scale_mode: self.scale_mode }
    }
}

fn check_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::DimensionError(format!("need at least 2 alternatives, got {n}")));
    }
    Ok(())
}
