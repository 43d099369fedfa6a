use serde::{Deserialize, Serialize};

use crate::assignment::Assignment;
use crate::error::ModelError;
use crate::model::ModelIr;
use crate::num::Scalar;

/// A failed constraint: its group and position inside the group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Violation {
    pub group: String,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalReport<S> {
    pub feasible: bool,
    pub violated: Vec<Violation>,
    pub objective: S,
}

/// Checks every grounded constraint and computes the objective, which is
/// reported whether or not the assignment is feasible.
pub fn evaluate_assignment<S: Scalar>(
    model: &ModelIr<S>,
    assignment: &Assignment<S>,
) -> Result<EvalReport<S>, ModelError> {
    assignment.check(model)?;
    let values = &assignment.values;
    let violated: Vec<Violation> = model
        .groups
        .iter()
        .flat_map(|g| {
            g.constraints
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.holds(values))
                .map(|(index, _)| Violation {
                    group: g.name.clone(),
                    index,
                })
        })
        .collect();
    Ok(EvalReport {
        feasible: violated.is_empty(),
        violated,
        objective: model.objective.expr.value(values),
    })
}

/// Per-group feasibility verdicts in group order.
pub fn group_verdicts<S: Scalar>(model: &ModelIr<S>, assignment: &Assignment<S>) -> Vec<(String, bool)> {
    model
        .groups
        .iter()
        .map(|g| {
            (
                g.name.clone(),
                g.constraints.iter().all(|c| c.holds(&assignment.values)),
            )
        })
        .collect()
}
