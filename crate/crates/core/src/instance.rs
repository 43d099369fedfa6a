//! Instance data as read from JSON: integer scalars and nested integer arrays
//! keyed by the names the models use.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::ParamValue;
use crate::num::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Gsp,
    Nsp,
    StaticNurse,
}

impl ProblemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Gsp => "gsp",
            ProblemKind::Nsp => "nsp",
            ProblemKind::StaticNurse => "static_nurse",
        }
    }

    /// The family holding the schedule a planner looks at.
    pub fn schedule_family(self) -> &'static str {
        match self {
            ProblemKind::Gsp => "workerHours",
            ProblemKind::Nsp => "nurseDayShift",
            ProblemKind::StaticNurse => "X",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gsp" => Ok(ProblemKind::Gsp),
            "nsp" => Ok(ProblemKind::Nsp),
            "static_nurse" | "static-nurse" | "nurse" => Ok(ProblemKind::StaticNurse),
            other => Err(format!("unknown problem kind `{other}`")),
        }
    }
}

/// A JSON integer or a nested list of them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    List(Vec<Value>),
}

impl Value {
    /// Builds a nested list from a row-major buffer.
    pub fn from_flat(dims: &[usize], values: &[i64]) -> Value {
        match dims.split_first() {
            None => Value::Int(values[0]),
            Some((&d, rest)) => {
                let stride: usize = rest.iter().product();
                Value::List(
                    (0..d)
                        .map(|i| Value::from_flat(rest, &values[i * stride..(i + 1) * stride]))
                        .collect(),
                )
            }
        }
    }

    /// Shape and row-major contents; errors on ragged nesting.
    pub fn flatten(&self) -> Result<(Vec<usize>, Vec<i64>), String> {
        match self {
            Value::Int(v) => Ok((Vec::new(), vec![*v])),
            Value::List(items) => {
                let mut dims: Option<Vec<usize>> = None;
                let mut flat = Vec::new();
                for item in items {
                    let (d, v) = item.flatten()?;
                    match &dims {
                        None => dims = Some(d),
                        Some(prev) if *prev != d => {
                            return Err(format!("ragged array: {prev:?} vs {d:?}"));
                        }
                        Some(_) => {}
                    }
                    flat.extend(v);
                }
                let mut shape = vec![items.len()];
                shape.extend(dims.unwrap_or_default());
                Ok((shape, flat))
            }
        }
    }
}

/// Problem kind plus its data dictionary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub kind: ProblemKind,
    pub data: BTreeMap<String, Value>,
}

impl Instance {
    pub fn new(kind: ProblemKind, data: BTreeMap<String, Value>) -> Self {
        Instance { kind, data }
    }

    /// Parses a flat JSON object whose top-level keys are the data keys.
    pub fn from_data_json(kind: ProblemKind, json: &str) -> Result<Self, ModelError> {
        let data: BTreeMap<String, Value> = serde_json::from_str(json)
            .map_err(|e| ModelError::schema("<root>", e.to_string()))?;
        Ok(Instance { kind, data })
    }

    pub fn contains(&self, key: &str) -> bool {
        self.data.contains_key(key)
    }

    pub fn set_scalar(&mut self, key: impl Into<String>, v: i64) {
        self.data.insert(key.into(), Value::Int(v));
    }

    pub fn set_array(&mut self, key: impl Into<String>, dims: &[usize], values: &[i64]) {
        self.data.insert(key.into(), Value::from_flat(dims, values));
    }

    pub fn with_scalar(mut self, key: impl Into<String>, v: i64) -> Self {
        self.set_scalar(key, v);
        self
    }

    fn get(&self, key: &str) -> Result<&Value, ModelError> {
        self.data
            .get(key)
            .ok_or_else(|| ModelError::schema(key, "missing key"))
    }

    pub fn scalar(&self, key: &str) -> Result<i64, ModelError> {
        match self.get(key)? {
            Value::Int(v) => Ok(*v),
            Value::List(_) => Err(ModelError::schema(key, "expected an integer, found an array")),
        }
    }

    /// Non-negative scalar usable as a dimension.
    pub fn extent(&self, key: &str) -> Result<usize, ModelError> {
        let v = self.scalar(key)?;
        usize::try_from(v).map_err(|_| ModelError::schema(key, format!("expected a non-negative integer, found {v}")))
    }

    /// Shape and contents of any entry, scalars having an empty shape.
    pub fn shaped(&self, key: &str) -> Result<(Vec<usize>, Vec<i64>), ModelError> {
        self.get(key)?
            .flatten()
            .map_err(|reason| ModelError::schema(key, reason))
    }

    /// Row-major contents of an array that must have exactly `dims`.
    pub fn array(&self, key: &str, dims: &[usize]) -> Result<Vec<i64>, ModelError> {
        let value = self.get(key)?;
        if let Value::Int(_) = value {
            return Err(ModelError::schema(key, "expected an array, found an integer"));
        }
        let (shape, flat) = value
            .flatten()
            .map_err(|reason| ModelError::schema(key, reason))?;
        // Arrays with a zero extent cannot carry their inner shape.
        let empty_ok = dims.contains(&0) && flat.is_empty();
        if shape != dims && !empty_ok {
            return Err(ModelError::schema(
                key,
                format!("expected dimensions {dims:?}, found {shape:?}"),
            ));
        }
        Ok(flat)
    }

    /// Like [`Instance::array`] but every entry must be 0 or 1.
    pub fn binary_array(&self, key: &str, dims: &[usize]) -> Result<Vec<i64>, ModelError> {
        let flat = self.array(key, dims)?;
        if let Some(pos) = flat.iter().position(|&v| v != 0 && v != 1) {
            return Err(ModelError::schema(
                key,
                format!("entry {pos} is {}, expected 0 or 1", flat[pos]),
            ));
        }
        Ok(flat)
    }

    /// Converts an entry into a model parameter value.
    pub fn param_value<S: Scalar>(&self, key: &str) -> Result<ParamValue<S>, ModelError> {
        let (dims, flat) = self.shaped(key)?;
        let values = convert_all::<S>(key, &flat)?;
        Ok(if dims.is_empty() {
            ParamValue::Scalar(values[0])
        } else {
            ParamValue::Array { dims, values }
        })
    }
}

pub(crate) fn convert_all<S: Scalar>(key: &str, flat: &[i64]) -> Result<Vec<S>, ModelError> {
    flat.iter()
        .map(|&v| {
            S::from_i64(v).ok_or_else(|| ModelError::schema(key, format!("value {v} overflows the scalar type")))
        })
        .collect()
}
