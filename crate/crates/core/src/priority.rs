use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::normalize;

/// Unnormalized priorities `u`, their normalization `w` and the induced ranking.
///
/// `ranking[0]` is the index of the most preferred alternative. Exactly equal
/// weights keep index order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PriorityVector {
    pub u: Vec<f64>,
    pub w: Vec<f64>,
    pub ranking: Vec<usize>,
}

impl PriorityVector {
    /// Normalizes a positive vector and ranks it.
    pub fn from_unnormalized(u: Vec<f64>) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::LengthMismatch { left: 0, right: 1 });
        }
        check_positive(&u)?;
        let w = normalize(&u);
        let ranking = rank_descending(&w);
        Ok(Self { u, w, ranking })
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }
}

/// Indices sorted by descending value; stable, so ties keep index order.
pub fn rank_descending(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order
}

pub(crate) fn check_positive(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
        Some(index) => Err(Error::NonPositiveComponent { index, value: values[index] }),
        None => Ok(()),
    }
}
