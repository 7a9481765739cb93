use thiserror::Error;

/// Errors raised by the laboratory.
///
/// Variants split into two families: validation errors (bad input, CLI exit
/// code 1) and numeric failures (divergence, caps, under-resolved quadrature,
/// CLI exit code 2).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    #[error("intervals ({0}) and ({1}) overlap")]
    Overlap(String, String),

    #[error("cell sets overlap at cell {0}")]
    CellOverlap(usize),

    #[error("interaction diverges: {0}")]
    Divergent(String),

    #[error("search space of {count} candidates exceeds the cap of {cap}")]
    CapExceeded { count: u128, cap: u128 },

    #[error("weight table under-resolved: {0}")]
    UnderResolved(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

impl LabError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        LabError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by input that fails validation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            LabError::Invalid { .. } | LabError::Overlap(..) | LabError::CellOverlap(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
