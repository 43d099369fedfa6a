//! The LLM contract and the offline backends behind it.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::prompts::{request_line, PromptStage};

/// A text-completion service. Implementations must tolerate concurrent
/// calls.
pub trait LlmBackend: Send + Sync {
    fn name(&self) -> &str;
    fn complete(&self, prompt: &str) -> Result<String, BackendError>;
}

impl<B: LlmBackend + ?Sized> LlmBackend for &B {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn complete(&self, prompt: &str) -> Result<String, BackendError> {
        (**self).complete(prompt)
    }
}

impl<B: LlmBackend + ?Sized> LlmBackend for Box<B> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn complete(&self, prompt: &str) -> Result<String, BackendError> {
        (**self).complete(prompt)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum BackendError {
    #[error("no recorded response for prompt {hash} ({excerpt})")]
    Unmatched { hash: String, excerpt: String },
    #[error("transport error: {0}")]
    Transport(String),
    #[error("malformed response: {0}")]
    Response(String),
    #[error("fixture error: {0}")]
    Fixture(String),
}

/// Hex SHA-256 of the prompt text.
pub fn prompt_hash(prompt: &str) -> String {
    hex::encode(Sha256::digest(prompt.as_bytes()))
}

/// Short human-readable key of a prompt: its stage plus the request and
/// error lines. Used for fuzzy fixture matching and in error messages.
pub fn prompt_excerpt(prompt: &str) -> String {
    let stage = PromptStage::detect(prompt).map_or("unknown", PromptStage::as_str);
    let mut key = format!("{stage} | {}", request_line(prompt).unwrap_or(""));
    if let Some(err) = prompt.lines().find(|l| l.starts_with("Error: ")) {
        key.push_str(" | ");
        key.push_str(err);
    }
    key
}

/// One recorded exchange.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureRecord {
    pub prompt_hash: String,
    pub prompt_excerpt: String,
    pub response: String,
    pub stage: PromptStage,
}

impl FixtureRecord {
    pub fn new(prompt: &str, response: impl Into<String>) -> Self {
        FixtureRecord {
            prompt_hash: prompt_hash(prompt),
            prompt_excerpt: prompt_excerpt(prompt),
            response: response.into(),
            stage: PromptStage::detect(prompt).unwrap_or(PromptStage::Coding),
        }
    }
}

pub const FIXTURE_FORMAT: &str = "dynsched-fixture/1";

/// A named transcript file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixture {
    pub format: String,
    pub name: String,
    pub records: Vec<FixtureRecord>,
}

impl Fixture {
    pub fn new(name: impl Into<String>, records: Vec<FixtureRecord>) -> Self {
        Fixture {
            format: FIXTURE_FORMAT.to_string(),
            name: name.into(),
            records,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, BackendError> {
        let f: Fixture = serde_json::from_str(text).map_err(|e| BackendError::Fixture(e.to_string()))?;
        if f.format != FIXTURE_FORMAT {
            return Err(BackendError::Fixture(format!("unsupported format `{}`", f.format)));
        }
        Ok(f)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, BackendError> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| BackendError::Fixture(format!("{}: {e}", path.display())))?;
        Fixture::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fixture serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), BackendError> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| BackendError::Fixture(e.to_string()))
    }
}

/// Replays recorded responses. The response is a pure function of the
/// prompt: exact matching by content hash, optionally falling back to the
/// first record with the same excerpt.
#[derive(Debug, Clone)]
pub struct FixtureBackend {
    name: String,
    by_hash: HashMap<String, String>,
    by_excerpt: HashMap<String, String>,
    fuzzy: bool,
}

impl FixtureBackend {
    pub fn new(fixture: Fixture) -> Result<Self, BackendError> {
        let mut by_hash: HashMap<String, String> = HashMap::new();
        let mut by_excerpt = HashMap::new();
        for r in fixture.records {
            if let Some(prev) = by_hash.get(&r.prompt_hash) {
                if *prev != r.response {
                    return Err(BackendError::Fixture(format!(
                        "prompt {} has two different responses",
                        r.prompt_hash
                    )));
                }
                continue;
            }
            by_excerpt.entry(r.prompt_excerpt).or_insert_with(|| r.response.clone());
            by_hash.insert(r.prompt_hash, r.response);
        }
        Ok(FixtureBackend {
            name: fixture.name,
            by_hash,
            by_excerpt,
            fuzzy: false,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, BackendError> {
        FixtureBackend::new(Fixture::load(path)?)
    }

    pub fn fuzzy(mut self, on: bool) -> Self {
        self.fuzzy = on;
        self
    }

    pub fn len(&self) -> usize {
        self.by_hash.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_hash.is_empty()
    }
}

impl LlmBackend for FixtureBackend {
    fn name(&self) -> &str {
        &self.name
    }

    fn complete(&self, prompt: &str) -> Result<String, BackendError> {
        let hash = prompt_hash(prompt);
        if let Some(r) = self.by_hash.get(&hash) {
            return Ok(r.clone());
        }
        let excerpt = prompt_excerpt(prompt);
        if self.fuzzy {
            if let Some(r) = self.by_excerpt.get(&excerpt) {
                return Ok(r.clone());
            }
        }
        Err(BackendError::Unmatched { hash, excerpt })
    }
}

/// Backend computed by a function of the prompt. Handy for scripted runs
/// and for producing fixtures together with [`RecordingBackend`].
pub struct FnBackend<F> {
    name: String,
    f: F,
}

impl<F> FnBackend<F>
where
    F: Fn(&str) -> Result<String, BackendError> + Send + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        FnBackend { name: name.into(), f }
    }
}

impl<F> LlmBackend for FnBackend<F>
where
    F: Fn(&str) -> Result<String, BackendError> + Send + Sync,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn complete(&self, prompt: &str) -> Result<String, BackendError> {
        (self.f)(prompt)
    }
}

/// Forwards to an inner backend and keeps every successful exchange.
pub struct RecordingBackend<B> {
    inner: B,
    records: Mutex<Vec<FixtureRecord>>,
}

impl<B: LlmBackend> RecordingBackend<B> {
    pub fn new(inner: B) -> Self {
        RecordingBackend {
            inner,
            records: Mutex::new(Vec::new()),
        }
    }

    pub fn records(&self) -> Vec<FixtureRecord> {
        self.records.lock().expect("recorder lock").clone()
    }

    /// Recorded exchanges as a fixture, deduplicated and sorted by hash so
    /// the file does not depend on call order.
    pub fn to_fixture(&self, name: impl Into<String>) -> Fixture {
        let mut records = self.records();
        records.sort_by(|a, b| a.prompt_hash.cmp(&b.prompt_hash));
        records.dedup();
        Fixture::new(name, records)
    }
}

impl<B: LlmBackend> LlmBackend for RecordingBackend<B> {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn complete(&self, prompt: &str) -> Result<String, BackendError> {
        let response = self.inner.complete(prompt)?;
        self.records
            .lock()
            .expect("recorder lock")
            .push(FixtureRecord::new(prompt, response.clone()));
        Ok(response)
    }
}

/// Responses scripted for one request: planning answers and coding-stage
/// answers (first coding call, then each repair), consumed in order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Script {
    pub planning: Vec<String>,
    pub coding: Vec<String>,
    pub paraphrase: Vec<String>,
}

/// Answers from per-request scripts, keyed by the prompt's request line.
/// Stateful, so it is meant for authoring fixtures through
/// [`RecordingBackend`], not for replay.
pub struct ScriptedBackend {
    name: String,
    scripts: HashMap<String, Script>,
    used: Mutex<HashMap<(String, PromptStage), usize>>,
}

impl ScriptedBackend {
    pub fn new(name: impl Into<String>) -> Self {
        ScriptedBackend {
            name: name.into(),
            scripts: HashMap::new(),
            used: Mutex::new(HashMap::new()),
        }
    }

    pub fn script(mut self, request: &str, script: Script) -> Self {
        self.add(request, script);
        self
    }

    pub fn add(&mut self, request: &str, script: Script) {
        let key = request.split_whitespace().collect::<Vec<_>>().join(" ");
        self.scripts.insert(key, script);
    }
}

impl LlmBackend for ScriptedBackend {
    fn name(&self) -> &str {
        &self.name
    }

    fn complete(&self, prompt: &str) -> Result<String, BackendError> {
        let unmatched = || BackendError::Unmatched {
            hash: prompt_hash(prompt),
            excerpt: prompt_excerpt(prompt),
        };
        let request = request_line(prompt).ok_or_else(unmatched)?;
        let stage = PromptStage::detect(prompt).ok_or_else(unmatched)?;
        let script = self.scripts.get(request).ok_or_else(unmatched)?;
        let (slot, list) = match stage {
            PromptStage::Planning => (PromptStage::Planning, &script.planning),
            PromptStage::Coding | PromptStage::Repair => (PromptStage::Coding, &script.coding),
            PromptStage::Paraphrase => (PromptStage::Paraphrase, &script.paraphrase),
        };
        let mut used = self.used.lock().expect("script lock");
        let n = used.entry((request.to_string(), slot)).or_insert(0);
        let answer = list.get(*n).or(list.last()).cloned().ok_or_else(unmatched)?;
        *n += 1;
        Ok(answer)
    }
}
