use thiserror::Error;

pub type Result<T> = std::result::Result<T, CureError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CureError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("image of size {width}x{height} is too small: {reason}")]
    TooSmall {
        width: usize,
        height: usize,
        reason: String,
    },

    #[error("incomplete band set: {0}")]
    IncompleteBands(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
}

impl CureError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        CureError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(CureError::LengthMismatch { expected, found })
    }
}
