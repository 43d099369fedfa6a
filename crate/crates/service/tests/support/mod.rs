#![allow(dead_code)]

#[path = "../../../agents/tests/support/motivating.rs"]
pub mod motivating;

use std::path::PathBuf;

use dynsched_agents::{FixtureBackend, LlmBackend};
use dynsched_core::{Instance, ProblemKind};
use dynsched_service::{Engine, EngineOptions};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn instance(kind: ProblemKind, file: &str) -> Instance {
    let text = std::fs::read_to_string(data_dir().join("instances").join(file)).unwrap();
    Instance::from_data_json(kind, &text).unwrap()
}

pub fn fixture(name: &str) -> FixtureBackend {
    FixtureBackend::load(data_dir().join("fixtures").join(format!("{name}.json"))).unwrap()
}

pub fn options() -> EngineOptions {
    EngineOptions {
        data_dir: data_dir(),
        seed: Some(7),
        ..EngineOptions::default()
    }
}

pub fn engine_with(backend: impl LlmBackend + 'static) -> Engine {
    Engine::open(Box::new(backend), options()).unwrap()
}

/// Engine replaying the two-step nurse scenario.
pub fn motivating_engine() -> Engine {
    engine_with(fixture("motivating"))
}
