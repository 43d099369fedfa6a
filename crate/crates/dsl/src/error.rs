use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::Span;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("{line}:{column}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub span: Span,
    pub line: usize,
    pub column: usize,
    /// Human-readable names of the acceptable tokens, sorted.
    pub expected: Vec<String>,
    pub found: String,
}

/// Everything that can go wrong between patch text and a grounded patch.
/// Each variant carries the span of the offending source.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum DslError {
    #[error("parse error at {0}")]
    Parse(ParseError),
    #[error("unknown parameter `{name}`: not in instance data or the model")]
    UnknownParameter { name: String, span: Span },
    #[error("unknown variable `{name}`: not a model or patch variable family")]
    UnknownVariable { name: String, span: Span },
    #[error("`{name}` takes {expected} indices, got {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
        span: Span,
    },
    #[error("`{name}` declared with shape {declared:?} but has shape {actual:?}")]
    ShapeMismatch {
        name: String,
        declared: Vec<usize>,
        actual: Vec<usize>,
        span: Span,
    },
    #[error("product of two variable expressions is not linear")]
    NonlinearTerm { span: Span },
    #[error("`{name}` is already defined")]
    DuplicateName { name: String, span: Span },
    #[error("cannot relax `{name}`: the model has no such constraint group")]
    UnknownGroup { name: String, span: Span },
    #[error("{message}")]
    TypeError { message: String, span: Span },
    #[error("index {index:?} is outside `{name}` with shape {dims:?}")]
    BoundsViolation {
        name: String,
        index: Vec<i64>,
        dims: Vec<usize>,
        span: Span,
    },
    #[error("integer overflow")]
    Overflow { span: Span },
}

impl DslError {
    /// Stable name of the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            DslError::Parse(_) => "ParseError",
            DslError::UnknownParameter { .. } => "UnknownParameter",
            DslError::UnknownVariable { .. } => "UnknownVariable",
            DslError::ArityMismatch { .. } => "ArityMismatch",
            DslError::ShapeMismatch { .. } => "ShapeMismatch",
            DslError::NonlinearTerm { .. } => "NonlinearTerm",
            DslError::DuplicateName { .. } => "DuplicateName",
            DslError::UnknownGroup { .. } => "UnknownGroup",
            DslError::TypeError { .. } => "TypeError",
            DslError::BoundsViolation { .. } => "BoundsViolation",
            DslError::Overflow { .. } => "Overflow",
        }
    }

    pub fn span(&self) -> Span {
        match self {
            DslError::Parse(p) => p.span,
            DslError::UnknownParameter { span, .. }
            | DslError::UnknownVariable { span, .. }
            | DslError::ArityMismatch { span, .. }
            | DslError::ShapeMismatch { span, .. }
            | DslError::NonlinearTerm { span }
            | DslError::DuplicateName { span, .. }
            | DslError::UnknownGroup { span, .. }
            | DslError::TypeError { span, .. }
            | DslError::BoundsViolation { span, .. }
            | DslError::Overflow { span } => *span,
        }
    }

    /// Key for documentation lookup: the class name, plus the expected set
    /// for parse errors.
    pub fn lookup_key(&self) -> String {
        match self {
            DslError::Parse(p) => format!("ParseError expected {}", p.expected.join(" ")),
            other => other.kind().to_string(),
        }
    }

    /// True for binding failures caused by names the data does not define.
    pub fn is_data_key_error(&self) -> bool {
        matches!(self, DslError::UnknownParameter { .. } | DslError::UnknownVariable { .. })
    }

    /// Error text with the location resolved against `source`.
    pub fn render(&self, source: &str) -> String {
        let (line, col) = self.span().line_col(source);
        match self {
            DslError::Parse(e) => format!(
                "{} at {line}:{col}: expected {}, found {}",
                self.kind(),
                e.expected.join(" or "),
                e.found
            ),
            _ => format!("{} at {line}:{col}: {self}", self.kind()),
        }
    }
}

impl From<ParseError> for DslError {
    fn from(e: ParseError) -> Self {
        DslError::Parse(e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DslWarning {
    /// A quantifier or sum range was empty and produced nothing.
    EmptyRange { span: Span },
}
