use std::collections::BTreeMap;
use std::fmt;

use dynsched_core::{Assignment, Scalar};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

/// Search budget. The time limit is always finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveLimits {
    /// Wall-clock budget in seconds.
    pub time_limit: f64,
    #[serde(default)]
    pub node_limit: Option<u64>,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits {
            time_limit: 10.0,
            node_limit: None,
        }
    }
}

impl SolveLimits {
    pub fn seconds(time_limit: f64) -> Self {
        SolveLimits {
            time_limit,
            node_limit: None,
        }
    }

    pub fn with_nodes(mut self, nodes: u64) -> Self {
        self.node_limit = Some(nodes);
        self
    }

    /// Budget used by the original gig-scheduling runs.
    pub fn gsp_preset() -> Self {
        Self::seconds(180.0)
    }

    /// Budget used by the original nurse-scheduling runs.
    pub fn nsp_preset() -> Self {
        Self::seconds(120.0)
    }

    pub(crate) fn sanitized(&self) -> Self {
        let t = if self.time_limit.is_finite() && self.time_limit > 0.0 {
            self.time_limit
        } else {
            SolveLimits::default().time_limit
        };
        SolveLimits {
            time_limit: t,
            node_limit: self.node_limit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    Unknown,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "Optimal",
            SolveStatus::Feasible => "Feasible",
            SolveStatus::Infeasible => "Infeasible",
            SolveStatus::Unknown => "Unknown",
        }
    }

    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Feasible)
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An objective bound on the extended integer line.
/// Serialized as a number, or as the strings `"-inf"` / `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound<S> {
    NegInf,
    Finite(S),
    PosInf,
}

impl<S: Scalar> Bound<S> {
    pub fn finite(self) -> Option<S> {
        match self {
            Bound::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub(crate) fn from_wide(v: i128) -> Self {
        match S::narrow(v) {
            Some(s) => Bound::Finite(s),
            None if v < 0 => Bound::NegInf,
            None => Bound::PosInf,
        }
    }

    pub fn negate(self) -> Self {
        match self {
            Bound::NegInf => Bound::PosInf,
            Bound::PosInf => Bound::NegInf,
            Bound::Finite(v) => Bound::Finite(-v),
        }
    }
}

impl<S: Scalar> fmt::Display for Bound<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => f.write_str("-inf"),
            Bound::PosInf => f.write_str("inf"),
            Bound::Finite(v) => write!(f, "{v}"),
        }
    }
}

impl<S: Scalar> Serialize for Bound<S> {
    fn serialize<Z: Serializer>(&self, z: Z) -> Result<Z::Ok, Z::Error> {
        match self {
            Bound::Finite(v) => v.serialize(z),
            Bound::NegInf => z.serialize_str("-inf"),
            Bound::PosInf => z.serialize_str("inf"),
        }
    }
}

impl<'de, S: Scalar> Deserialize<'de> for Bound<S> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw<S> {
            Num(S),
            Text(String),
        }
        match Raw::<S>::deserialize(d)? {
            Raw::Num(v) => Ok(Bound::Finite(v)),
            Raw::Text(t) => match t.as_str() {
                "-inf" => Ok(Bound::NegInf),
                "inf" | "+inf" => Ok(Bound::PosInf),
                other => Err(de::Error::custom(format!("bad bound {other:?}"))),
            },
        }
    }
}

/// Outcome of a solve.
///
/// For minimization `lower_bound` is the proven dual bound and `upper_bound`
/// the incumbent's objective. For maximization the roles swap: the incumbent
/// is `lower_bound` and the dual bound is `upper_bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct SolveReport<S> {
    pub status: SolveStatus,
    pub best: Option<Assignment<S>>,
    pub objective: Option<S>,
    pub lower_bound: Bound<S>,
    pub upper_bound: Bound<S>,
    pub nodes: u64,
    pub wall_time: f64,
}

impl<S: Scalar> SolveReport<S> {
    /// Copy with the timing zeroed, the only field that varies between
    /// otherwise identical runs.
    pub fn without_timing(&self) -> Self {
        SolveReport {
            wall_time: 0.0,
            ..self.clone()
        }
    }

    /// Flat statistics record for logs and service responses.
    pub fn stats(&self) -> BTreeMap<&'static str, String> {
        let mut kv = BTreeMap::new();
        kv.insert("status", self.status.to_string());
        kv.insert(
            "objective",
            self.objective.map_or_else(|| "none".to_string(), |v| v.to_string()),
        );
        kv.insert("lower_bound", self.lower_bound.to_string());
        kv.insert("upper_bound", self.upper_bound.to_string());
        kv.insert("nodes", self.nodes.to_string());
        kv.insert("wall_time", format!("{:.6}", self.wall_time));
        kv
    }
}
