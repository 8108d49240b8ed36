use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{JudgmentMatrix, ScaleMode};

/// A judgment matrix under construction.
///
/// Only the upper triangle is stored; the lower triangle and diagonal are
/// derived on read, so reciprocity holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialJudgments {
    n: usize,
    upper: Vec<Option<f64>>,
    scale_mode: ScaleMode,
}

/// A fully judged triple `i < j < k` with `a_ik != a_ij a_jk`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TransitivityViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    /// `a_ik`
    pub direct: f64,
    /// `a_ij * a_jk`
    pub indirect: f64,
}

impl PartialJudgments {
    pub fn new(n: usize, scale_mode: ScaleMode) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionError(format!("need at least 2 alternatives, got {n}")));
        }
        Ok(Self { n, upper: vec![None; n * (n - 1) / 2], scale_mode })
    }

    pub fn from_matrix(a: &JudgmentMatrix) -> Self {
        let mut p = Self::new(a.n(), a.scale_mode()).expect("matrix has n >= 2");
        for (i, j, v) in a.upper_judgments() {
            let slot = p.slot(i, j);
            p.upper[slot] = Some(v);
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scale_mode(&self) -> ScaleMode {
        self.scale_mode
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        // offset of row i in the packed upper triangle
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    fn check_position(&self, i: usize, j: usize) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::InvalidPosition { row: i, col: j, reason: "index out of range" });
        }
        if i == j {
            return Err(Error::InvalidPosition { row: i, col: j, reason: "diagonal is fixed at 1" });
        }
        if i > j {
            return Err(Error::InvalidPosition { row: i, col: j, reason: "expected i < j" });
        }
        Ok(())
    }

    /// Records `a_ij = value` (and implicitly `a_ji = 1 / value`), `i < j`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        self.check_position(i, j)?;
        self.scale_mode.check(i, j, value)?;
        let slot = self.slot(i, j);
        self.upper[slot] = Some(value);
        Ok(())
    }

    pub fn clear(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_position(i, j)?;
        let slot = self.slot(i, j);
        self.upper[slot] = None;
        Ok(())
    }

    /// Entry `(i, j)` if known.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        use core::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Equal => Some(1.0),
            Ordering::Less => self.upper[self.slot(i, j)],
            Ordering::Greater => self.upper[self.slot(j, i)].map(|v| 1.0 / v),
        }
    }

    pub fn rows(&self) -> Vec<Vec<Option<f64>>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Recorded judgments `(i, j, a_ij)`, `i < j`, row by row.
    pub fn judgments(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if let Some(v) = self.upper[self.slot(i, j)] {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    pub fn judged_count(&self) -> usize {
        self.upper.iter().filter(|v| v.is_some()).count()
    }

    /// `N(N-1)/2`.
    pub fn total_pairs(&self) -> usize {
        self.upper.len()
    }

    pub fn is_complete(&self) -> bool {
        self.upper.iter().all(Option::is_some)
    }

    /// The completed matrix, or [`Error::MissingJudgment`] for the first gap.
    pub fn to_matrix(&self) -> Result<JudgmentMatrix> {
        JudgmentMatrix::from_upper(self.n, &self.judgments(), self.scale_mode)
    }

    /// Fully judged triples violating transitivity beyond relative tolerance `tol`.
    pub fn transitivity_violations(&self, tol: f64) -> Vec<TransitivityViolation> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let Some(a_ij) = self.get(i, j) else { continue };
                for k in (j + 1)..self.n {
                    let (Some(a_jk), Some(a_ik)) = (self.get(j, k), self.get(i, k)) else {
                        continue;
                    };
                    let indirect = a_ij * a_jk;
                    if (a_ik - indirect).abs() > tol * a_ik {
                        out.push(TransitivityViolation { i, j, k, direct: a_ik, indirect });
                    }
                }
            }
        }
        out
    }
}
