use dynsched_agents::{BackendError, Failure, ParaphraseError, PipelineError};
use dynsched_core::ModelError;
use dynsched_dsl::DslError;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("session `{0}` not found")]
    NotFound(String),
    #[error("the session has no schedule yet; solve it first")]
    NoSchedule,
    #[error("there is no pending patch")]
    NoPending,
    #[error("patch not accepted: {0}")]
    NotAccepted(String),
    #[error("{0}")]
    Pipeline(Box<PipelineError>),
    #[error("{rendered}")]
    Dsl { error: Box<DslError>, rendered: String, text: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("invalid request: {0}")]
    BadRequest(String),
    #[error("session file {path} cannot be replayed: {reason}")]
    Corrupt { path: String, reason: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for ServiceError {
    fn from(e: std::io::Error) -> Self {
        ServiceError::Io(e.to_string())
    }
}

impl From<PipelineError> for ServiceError {
    fn from(e: PipelineError) -> Self {
        ServiceError::Pipeline(Box::new(e))
    }
}

impl From<ParaphraseError> for ServiceError {
    fn from(e: ParaphraseError) -> Self {
        match e {
            ParaphraseError::Backend(b) => ServiceError::Backend(b),
            other => ServiceError::BadRequest(other.to_string()),
        }
    }
}

impl ServiceError {
    pub fn dsl(error: DslError, text: &str) -> Self {
        ServiceError::Dsl {
            rendered: error.render(text),
            error: Box::new(error),
            text: text.to_string(),
        }
    }

    /// Short error class shown to clients.
    pub fn class(&self) -> &'static str {
        match self {
            ServiceError::NotFound(_) => "NotFound",
            ServiceError::NoSchedule => "NoSchedule",
            ServiceError::NoPending => "NoPending",
            ServiceError::NotAccepted(_) => "NotAccepted",
            ServiceError::Pipeline(p) => match &p.failure {
                Failure::FixExhausted { .. } => "FixExhausted",
                Failure::PlanParse(_) => "PlanParseError",
                Failure::Backend(_) => "BackendError",
            },
            ServiceError::Dsl { error, .. } => error.kind(),
            ServiceError::Model(_) => "ModelError",
            ServiceError::Backend(_) => "BackendError",
            ServiceError::BadRequest(_) => "BadRequest",
            ServiceError::Corrupt { .. } => "CorruptSession",
            ServiceError::Io(_) => "IoError",
        }
    }

    pub fn http_status(&self) -> u16 {
        match self {
            ServiceError::NotFound(_) => 404,
            ServiceError::NoSchedule | ServiceError::NoPending | ServiceError::NotAccepted(_) => 409,
            ServiceError::Pipeline(p) if matches!(p.failure, Failure::Backend(_)) => 502,
            ServiceError::Pipeline(_) | ServiceError::Dsl { .. } | ServiceError::Model(_) => 422,
            ServiceError::BadRequest(_) => 400,
            ServiceError::Backend(_) => 502,
            ServiceError::Corrupt { .. } | ServiceError::Io(_) => 500,
        }
    }

    /// JSON error document. DSL errors carry the offending span and text so
    /// a client can highlight it.
    pub fn body(&self) -> Value {
        let mut body = json!({ "error": self.class(), "message": self.to_string() });
        let dsl = match self {
            ServiceError::Dsl { error, text, .. } => Some((&**error, text.as_str())),
            ServiceError::Pipeline(p) => match &p.failure {
                Failure::FixExhausted { error, text, .. } => Some((error, text.as_str())),
                _ => None,
            },
            _ => None,
        };
        if let Some((error, text)) = dsl {
            let span = error.span();
            body["dsl_error"] = json!(error.kind());
            body["span"] = json!({ "start": span.start, "end": span.end });
            body["text"] = json!(text);
        }
        if let ServiceError::Pipeline(p) = self {
            body["attempts"] = json!(p.attempts);
            body["transcript"] = serde_json::to_value(&p.transcript).unwrap_or(Value::Null);
        }
        body
    }
}

pub type Result<T, E = ServiceError> = std::result::Result<T, E>;
