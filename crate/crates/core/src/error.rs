use thiserror::Error;

/// Errors raised by model construction, evaluation and patch application.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("schema error at key `{key}`: {reason}")]
    Schema { key: String, reason: String },

    #[error("assignment covers {got} variables, model has {expected}")]
    PartialAssignment { expected: usize, got: usize },

    #[error("value {value} of {var} lies outside [{lo}, {hi}]")]
    OutOfBounds {
        var: String,
        value: String,
        lo: String,
        hi: String,
    },

    #[error("family `{family}`: dimensions {left:?} and {right:?} disagree")]
    FamilyMismatch {
        family: String,
        left: Vec<usize>,
        right: Vec<usize>,
    },

    #[error("unknown variable family `{0}`")]
    UnknownFamily(String),

    #[error("unknown constraint group `{0}`")]
    UnknownGroup(String),

    #[error("duplicate name `{0}`")]
    Duplicate(String),

    #[error("patch was grounded against a model with {patch} variables, target has {model}")]
    SignatureMismatch { patch: usize, model: usize },

    #[error("malformed model: {0}")]
    Invalid(String),
}

impl ModelError {
    pub(crate) fn schema(key: impl Into<String>, reason: impl Into<String>) -> Self {
        ModelError::Schema {
            key: key.into(),
            reason: reason.into(),
        }
    }
}
