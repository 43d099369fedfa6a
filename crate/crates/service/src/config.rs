//! Service settings: a TOML file, then `DYNSCHED_*` environment overrides.

use std::path::{Path, PathBuf};

use dynsched_agents::{AgentConfig, BackendError, FnBackend, LlmBackend};
use dynsched_solver::SolveLimits;
use serde::{Deserialize, Serialize};

use crate::engine::EngineOptions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ServiceConfig {
    pub bind: String,
    pub sessions_dir: Option<PathBuf>,
    pub data_dir: PathBuf,
    pub time_limit_secs: f64,
    pub node_limit: Option<u64>,
    pub seed: Option<u64>,
    pub agent: AgentConfig,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            bind: "127.0.0.1:8080".into(),
            sessions_dir: None,
            data_dir: PathBuf::from("data"),
            time_limit_secs: SolveLimits::default().time_limit,
            node_limit: None,
            seed: None,
            agent: AgentConfig::default(),
        }
    }
}

fn parse_env<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.trim().parse().map_err(|_| format!("invalid {key} `{v}`"))
}

impl ServiceConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Reads `path`, or returns the defaults when no path is given.
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        match path {
            None => Ok(ServiceConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
                ServiceConfig::from_toml(&text).map_err(|e| format!("{}: {e}", p.display()))
            }
        }
    }

    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<(), String> {
        if let Some(v) = lookup("DYNSCHED_BIND") {
            self.bind = v;
        }
        if let Some(v) = lookup("DYNSCHED_SESSIONS") {
            self.sessions_dir = Some(PathBuf::from(v));
        }
        if let Some(v) = lookup("DYNSCHED_DATA") {
            self.data_dir = PathBuf::from(v);
        }
        if let Some(v) = lookup("DYNSCHED_TIME_LIMIT") {
            self.time_limit_secs = parse_env("DYNSCHED_TIME_LIMIT", &v)?;
        }
        if let Some(v) = lookup("DYNSCHED_NODE_LIMIT") {
            self.node_limit = Some(parse_env("DYNSCHED_NODE_LIMIT", &v)?);
        }
        if let Some(v) = lookup("DYNSCHED_SEED") {
            self.seed = Some(parse_env("DYNSCHED_SEED", &v)?);
        }
        self.agent.apply_env(lookup)
    }

    pub fn limits(&self) -> SolveLimits {
        SolveLimits {
            time_limit: self.time_limit_secs,
            node_limit: self.node_limit,
        }
    }

    pub fn engine_options(&self) -> EngineOptions {
        EngineOptions {
            sessions_dir: self.sessions_dir.clone(),
            data_dir: self.data_dir.clone(),
            limits: self.limits(),
            max_attempts: self.agent.max_attempts,
            seed: self.seed,
        }
    }

    /// The configured backend. Without a fixture file every call fails, so
    /// solving and exporting still work offline.
    pub fn build_backend(&self) -> Result<Box<dyn LlmBackend>, BackendError> {
        if self.agent.backend == dynsched_agents::BackendKind::Fixture && self.agent.fixture.is_none() {
            return Ok(Box::new(FnBackend::new("unconfigured", |_: &str| {
                Err(BackendError::Fixture(
                    "no fixture file configured; set DYNSCHED_FIXTURE or pass --fixture".into(),
                ))
            })));
        }
        self.agent.build_backend()
    }
}
