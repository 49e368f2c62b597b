use thiserror::Error;

/// Errors raised by the lab's constructors, channels and experiments.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    /// A requested object would exceed a configured size budget.
    #[error("capacity exceeded: {what} needs {required}, limit is {limit}")]
    Capacity {
        what: String,
        required: u128,
        limit: u128,
    },
    /// Inputs are well-formed but outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// The input admits no meaningful output (e.g. normalising a zero vector).
    #[error("degenerate input: {0}")]
    Degenerate(String),
    /// A rank decision fell inside the numerical tolerance band.
    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),
    /// An internal identity that must hold by construction did not.
    #[error("consistency error: {0}")]
    Consistency(String),
}

impl LabError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        LabError::Domain(msg.into())
    }

    pub(crate) fn capacity(what: impl Into<String>, required: u128, limit: u128) -> Self {
        LabError::Capacity {
            what: what.into(),
            required,
            limit,
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
