//! Backend selection and pipeline settings.

use serde::{Deserialize, Serialize};

use crate::backend::{BackendError, FixtureBackend, LlmBackend};
use crate::http::HttpBackend;
use crate::pipeline::DEFAULT_MAX_ATTEMPTS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Fixture,
    Http,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentConfig {
    pub backend: BackendKind,
    /// Transcript file replayed by the fixture backend.
    pub fixture: Option<String>,
    /// Fall back to matching on the request line when the hash misses.
    pub fuzzy: bool,
    pub endpoint: String,
    pub api_key: Option<String>,
    pub model: String,
    pub timeout_secs: u64,
    pub max_attempts: usize,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            backend: BackendKind::Fixture,
            fixture: None,
            fuzzy: false,
            endpoint: "http://localhost:8000/v1/chat/completions".into(),
            api_key: None,
            model: "default".into(),
            timeout_secs: 120,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        }
    }
}

fn flag(v: &str) -> bool {
    matches!(v.trim().to_ascii_lowercase().as_str(), "1" | "true" | "yes" | "on")
}

impl AgentConfig {
    /// Overrides fields from `DYNSCHED_*` variables found by `lookup`.
    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<(), String> {
        if let Some(v) = lookup("DYNSCHED_BACKEND") {
            self.backend = match v.trim().to_ascii_lowercase().as_str() {
                "fixture" => BackendKind::Fixture,
                "http" => BackendKind::Http,
                other => return Err(format!("unknown backend `{other}`")),
            };
        }
        if let Some(v) = lookup("DYNSCHED_FIXTURE") {
            self.fixture = Some(v);
        }
        if let Some(v) = lookup("DYNSCHED_FUZZY") {
            self.fuzzy = flag(&v);
        }
        if let Some(v) = lookup("DYNSCHED_ENDPOINT") {
            self.endpoint = v;
        }
        if let Some(v) = lookup("DYNSCHED_API_KEY") {
            self.api_key = Some(v);
        }
        if let Some(v) = lookup("DYNSCHED_MODEL") {
            self.model = v;
        }
        if let Some(v) = lookup("DYNSCHED_MAX_ATTEMPTS") {
            self.max_attempts = v
                .trim()
                .parse()
                .ok()
                .filter(|n| *n >= 1)
                .ok_or_else(|| format!("invalid DYNSCHED_MAX_ATTEMPTS `{v}`"))?;
        }
        Ok(())
    }

    pub fn build_backend(&self) -> Result<Box<dyn LlmBackend>, BackendError> {
        match self.backend {
            BackendKind::Fixture => {
                let path = self
                    .fixture
                    .as_deref()
                    .ok_or_else(|| BackendError::Fixture("no fixture file configured".into()))?;
                Ok(Box::new(FixtureBackend::load(path)?.fuzzy(self.fuzzy)))
            }
            BackendKind::Http => Ok(Box::new(HttpBackend {
                endpoint: self.endpoint.clone(),
                api_key: self.api_key.clone(),
                model: self.model.clone(),
                timeout_secs: self.timeout_secs,
            })),
        }
    }
}
