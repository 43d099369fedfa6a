//! Live chat-completion backend. Not used by the test suite.

use serde_json::{json, Value};

use crate::backend::{BackendError, LlmBackend};

#[derive(Debug, Clone)]
pub struct HttpBackend {
    pub endpoint: String,
    pub api_key: Option<String>,
    pub model: String,
    pub timeout_secs: u64,
}

/// Request body with the prompt as the single user message.
pub fn request_body(model: &str, prompt: &str) -> Value {
    json!({
        "model": model,
        "messages": [{"role": "user", "content": prompt}],
        "temperature": 0,
    })
}

/// Text of the first choice of a chat-completion response.
pub fn extract_text(body: &Value) -> Result<String, BackendError> {
    let choice = body
        .get("choices")
        .and_then(|c| c.get(0))
        .ok_or_else(|| BackendError::Response("no choices in response".into()))?;
    choice
        .pointer("/message/content")
        .or_else(|| choice.get("text"))
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| BackendError::Response("first choice has no text".into()))
}

impl LlmBackend for HttpBackend {
    fn name(&self) -> &str {
        &self.model
    }

    fn complete(&self, prompt: &str) -> Result<String, BackendError> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(std::time::Duration::from_secs(self.timeout_secs)))
            .build()
            .into();
        let mut req = agent.post(&self.endpoint).header("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req
            .send_json(request_body(&self.model, prompt))
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        let body: Value = resp
            .body_mut()
            .read_json()
            .map_err(|e| BackendError::Response(e.to_string()))?;
        extract_text(&body)
    }
}
