//! Priority vectors from pairwise comparison matrices.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! - validated reciprocal judgment matrices ([`JudgmentMatrix`]) and partially
//!   filled ones ([`PartialJudgments`]),
//! - the logarithmic least squares (row geometric mean) solution together with
//!   its residual statistics ([`lls`]),
//! - an independent linear-system route to the same solution ([`oracle`]),
//! - the principal eigenvector baseline and its inconsistency index ([`eigen`]),
//! - weighted aggregation of several experts and the generalized
//!   Kullback-Leibler formulation of the same problem ([`group`]).
//!
//! All operations are pure functions over immutable inputs.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod eigen;
mod error;
pub mod group;
pub mod lls;
mod math;
mod matrix;
pub mod oracle;
mod partial;
mod priority;

pub use eigen::{inconsistency_index, saaty_priorities, EigenReport, PowerIteration};
pub use error::{Error, Result};
pub use group::{
    group_lls_priorities, kl_aggregate, kl_divergence, verify_equivalence, GroupJudgment,
    GroupResult,
};
pub use lls::{consistency_report, consistent_approximation, lls_priorities, ConsistencyReport};
pub use matrix::{JudgmentMatrix, ScaleMode, RECIPROCITY_TOL, SAATY_MAX, SAATY_MIN};
pub use oracle::lls_linear_system_oracle;
pub use partial::{PartialJudgments, TransitivityViolation};
pub use priority::PriorityVector;
