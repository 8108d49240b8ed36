use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

/// Every failure the numerical core can report.
///
/// [`Error::code`] gives a stable snake_case identifier used by the service
/// and CLI layers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("entry ({row}, {col}) must be positive, got {value}")]
    NonPositiveEntry { row: usize, col: usize, value: f64 },
    #[error("entries ({row}, {col}) and ({col}, {row}) are not reciprocal: product is {product}")]
    ReciprocityViolation { row: usize, col: usize, product: f64 },
    #[error("entry ({row}, {col}) = {value} lies outside the 1/9..9 comparison scale")]
    ScaleViolation { row: usize, col: usize, value: f64 },
    #[error("dimension error: {0}")]
    DimensionError(String),
    #[error("first entry of the first row must be 1, got {0}")]
    FirstEntryNotOne(f64),
    #[error("judgment ({row}, {col}) is missing")]
    MissingJudgment { row: usize, col: usize },
    #[error("invalid judgment position ({row}, {col}): {reason}")]
    InvalidPosition { row: usize, col: usize, reason: &'static str },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("power iteration did not converge within {iterations} iterations")]
    NotConverged { iterations: usize },
    #[error("expert matrices have differing sizes: expected {expected}, expert {expert} has {found}")]
    MismatchedDimensions { expected: usize, expert: usize, found: usize },
    #[error("invalid expert weights: {0}")]
    WeightError(String),
    #[error("component {index} must be positive, got {value}")]
    NonPositiveComponent { index: usize, value: f64 },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonPositiveEntry { .. } => "non_positive_entry",
            Error::ReciprocityViolation { .. } => "reciprocity_violation",
            Error::ScaleViolation { .. } => "scale_violation",
            Error::DimensionError(_) => "dimension_error",
            Error::FirstEntryNotOne(_) => "first_entry_not_one",
            Error::MissingJudgment { .. } => "missing_judgment",
            Error::InvalidPosition { .. } => "invalid_position",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NotConverged { .. } => "not_converged",
            Error::MismatchedDimensions { .. } => "mismatched_dimensions",
            Error::WeightError(_) => "weight_error",
            Error::NonPositiveComponent { .. } => "non_positive_component",
            Error::LengthMismatch { .. } => "length_mismatch",
        }
    }
}
