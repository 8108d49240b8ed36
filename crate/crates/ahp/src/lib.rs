//! File formats, session storage, command-line and HTTP front ends for
//! `ahp-core`.

pub mod cli;
pub mod compare;
pub mod error;
pub mod format;
pub mod report;
pub mod sampling;
pub mod service;
pub mod store;

pub use error::{AhpError, Result};
