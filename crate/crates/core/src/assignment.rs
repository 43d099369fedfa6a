//! Complete assignments, per-family views and the Hamming distance between
//! schedules.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::{ModelIr, ParamValue, VarId};
use crate::num::Scalar;

/// One value per model variable, indexed by [`VarId`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment<S> {
    pub values: Vec<S>,
}

impl<S: Scalar> Assignment<S> {
    pub fn new(values: Vec<S>) -> Self {
        Assignment { values }
    }

    pub fn zeros(n: usize) -> Self {
        Assignment {
            values: vec![S::zero(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, var: VarId) -> S {
        self.values[var.0]
    }

    pub fn set(&mut self, var: VarId, value: S) {
        self.values[var.0] = value;
    }

    /// Errors unless the assignment is total over `model` and in bounds.
    pub fn check(&self, model: &ModelIr<S>) -> Result<(), ModelError> {
        let n = model.num_vars();
        if self.values.len() != n {
            return Err(ModelError::PartialAssignment {
                expected: n,
                got: self.values.len(),
            });
        }
        for (i, (&v, (lo, hi))) in self.values.iter().zip(model.bounds()).enumerate() {
            if v < lo || v > hi {
                return Err(ModelError::OutOfBounds {
                    var: model.var_name(VarId(i)),
                    value: v.to_string(),
                    lo: lo.to_string(),
                    hi: hi.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Copies out the cells of one family.
    pub fn family(&self, model: &ModelIr<S>, name: &str) -> Result<FamilyValues<S>, ModelError> {
        let fam = model
            .family(name)
            .ok_or_else(|| ModelError::UnknownFamily(name.to_string()))?;
        let end = fam.offset + fam.family.len();
        if self.values.len() < end {
            return Err(ModelError::PartialAssignment {
                expected: model.num_vars(),
                got: self.values.len(),
            });
        }
        Ok(FamilyValues {
            name: name.to_string(),
            dims: fam.family.dims.clone(),
            values: self.values[fam.offset..end].to_vec(),
        })
    }
}

/// The values of a single family, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FamilyValues<S> {
    pub name: String,
    pub dims: Vec<usize>,
    pub values: Vec<S>,
}

impl<S: Scalar> FamilyValues<S> {
    pub fn get(&self, index: &[usize]) -> Option<S> {
        crate::model::flat_index(&self.dims, index).map(|i| self.values[i])
    }

    pub fn unflatten(&self, flat: usize) -> Vec<usize> {
        crate::model::unflatten(&self.dims, flat)
    }

    /// The family as a parameter value, e.g. to seed `origSchedule`.
    pub fn to_param(&self) -> ParamValue<S> {
        ParamValue::Array {
            dims: self.dims.clone(),
            values: self.values.clone(),
        }
    }

    /// The family as plain integers for instance data.
    pub fn to_i64(&self) -> Vec<i64> {
        self.values
            .iter()
            .map(|v| v.to_i64().expect("scalar fits in i64"))
            .collect()
    }

    fn ensure_same_shape(&self, other: &Self) -> Result<(), ModelError> {
        if self.dims != other.dims {
            return Err(ModelError::FamilyMismatch {
                family: self.name.clone(),
                left: self.dims.clone(),
                right: other.dims.clone(),
            });
        }
        Ok(())
    }

    /// Row-major offsets of the cells whose values differ.
    pub fn changed_cells(&self, other: &Self) -> Result<Vec<usize>, ModelError> {
        self.ensure_same_shape(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, _)| i)
            .collect())
    }
}

/// Number of cells in which two schedules of the same family differ.
pub fn hamming_distance<S: Scalar>(a: &FamilyValues<S>, b: &FamilyValues<S>) -> Result<u64, ModelError> {
    a.ensure_same_shape(b)?;
    Ok(a.values.iter().zip(&b.values).filter(|(x, y)| x != y).count() as u64)
}
