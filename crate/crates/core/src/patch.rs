//! Fully numeric constraint patches and their application to a model.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::{ConstraintGroup, ModelIr, Param, VariableFamily};
use crate::num::Scalar;

/// Additions and removals ready to be spliced into a model. Variable ids in
/// `groups` assume `families` are appended after the base model's
/// `base_num_vars` variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundedPatch<S> {
    pub base_num_vars: usize,
    pub params: Vec<Param<S>>,
    pub families: Vec<VariableFamily<S>>,
    pub groups: Vec<ConstraintGroup<S>>,
    pub relaxed: Vec<String>,
}

impl<S: Scalar> GroundedPatch<S> {
    pub fn empty(model: &ModelIr<S>) -> Self {
        GroundedPatch {
            base_num_vars: model.num_vars(),
            params: Vec::new(),
            families: Vec::new(),
            groups: Vec::new(),
            relaxed: Vec::new(),
        }
    }

    pub fn num_constraints(&self) -> usize {
        self.groups.iter().map(ConstraintGroup::len).sum()
    }
}

/// Returns a copy of `model` with `relaxed` groups removed and the patch's
/// parameters, families and groups appended. The input model is untouched.
pub fn apply_patch<S: Scalar>(model: &ModelIr<S>, patch: &GroundedPatch<S>) -> Result<ModelIr<S>, ModelError> {
    let n = model.num_vars();
    if patch.base_num_vars != n {
        return Err(ModelError::SignatureMismatch {
            patch: patch.base_num_vars,
            model: n,
        });
    }
    let mut next = model.clone();

    let relaxed: HashSet<&str> = patch.relaxed.iter().map(String::as_str).collect();
    for name in &patch.relaxed {
        if model.group(name).is_none() {
            return Err(ModelError::UnknownGroup(name.clone()));
        }
    }
    next.groups.retain(|g| !relaxed.contains(g.name.as_str()));

    for param in &patch.params {
        if next.param(&param.name).is_some() {
            return Err(ModelError::Duplicate(param.name.clone()));
        }
        next.params.push(param.clone());
    }
    for family in &patch.families {
        if next.family(&family.name).is_some() {
            return Err(ModelError::Duplicate(family.name.clone()));
        }
        next.families.push(family.clone());
    }
    for group in &patch.groups {
        if next.group(&group.name).is_some() {
            return Err(ModelError::Duplicate(group.name.clone()));
        }
        next.groups.push(group.clone());
    }
    next.validate()?;
    Ok(next)
}
