//! Test-set files.

use std::path::Path;

use dynsched_core::{Instance, ProblemKind};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const TESTSET_FORMAT: &str = "dynsched-testset/1";

/// One request with its reference patch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub id: String,
    /// Cases sharing a group are rewordings of one request.
    pub group: String,
    pub kind: ProblemKind,
    /// Data keys the base model and both patches bind against.
    pub instance: Instance,
    pub nl: String,
    /// Reference patch in the constraint language.
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestSet {
    pub format: String,
    pub name: String,
    pub cases: Vec<TestCase>,
}

#[derive(Debug, Error)]
pub enum TestSetError {
    #[error("{0}")]
    Io(String),
    #[error("malformed test set: {0}")]
    Format(String),
}

impl TestSet {
    pub fn new(name: impl Into<String>, cases: Vec<TestCase>) -> Self {
        TestSet {
            format: TESTSET_FORMAT.into(),
            name: name.into(),
            cases,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, TestSetError> {
        let t: TestSet = serde_json::from_str(text).map_err(|e| TestSetError::Format(e.to_string()))?;
        if t.format != TESTSET_FORMAT {
            return Err(TestSetError::Format(format!("unsupported format `{}`", t.format)));
        }
        if let Some(c) = t.cases.iter().find(|c| c.instance.kind != c.kind) {
            return Err(TestSetError::Format(format!("case {} has a mismatched instance kind", c.id)));
        }
        Ok(t)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TestSetError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| TestSetError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("test set serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), TestSetError> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| TestSetError::Io(e.to_string()))
    }
}
