use thiserror::Error;

/// Errors raised while building operators, states, or running analyses.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BellError {
    /// An input violates a documented precondition.
    #[error("validation error: {0}")]
    Validation(String),

    /// A size limit was exceeded.
    #[error("capacity error: {what} is {requested}, limit is {limit}{hint}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
        hint: &'static str,
    },
}

impl BellError {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        BellError::Validation(msg.into())
    }

    pub(crate) fn capacity(what: &'static str, requested: usize, limit: usize) -> Self {
        BellError::Capacity {
            what,
            requested,
            limit,
            hint: "",
        }
    }

    /// True for [`BellError::Capacity`].
    pub fn is_capacity(&self) -> bool {
        matches!(self, BellError::Capacity { .. })
    }
}

pub type Result<T, E = BellError> = std::result::Result<T, E>;
