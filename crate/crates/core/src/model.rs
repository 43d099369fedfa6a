//! The model intermediate representation: parameters, variable families,
//! named groups of linear constraints and an objective.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::num::Scalar;

/// Global variable index. Families occupy contiguous id ranges in declaration
/// order and each family is laid out row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "==")]
    Eq,
}

impl Relation {
    pub fn holds<S: Ord>(self, lhs: S, rhs: S) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "==",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum VarKind<S> {
    Boolean,
    Integer { lo: S, hi: S },
}

/// A dense, row-major array of decision variables sharing one domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VariableFamily<S> {
    pub name: String,
    pub dims: Vec<usize>,
    pub kind: VarKind<S>,
    #[serde(default)]
    pub description: String,
}

impl<S: Scalar> VariableFamily<S> {
    pub fn boolean(name: impl Into<String>, dims: Vec<usize>, description: impl Into<String>) -> Self {
        VariableFamily {
            name: name.into(),
            dims,
            kind: VarKind::Boolean,
            description: description.into(),
        }
    }

    pub fn integer(
        name: impl Into<String>,
        dims: Vec<usize>,
        lo: S,
        hi: S,
        description: impl Into<String>,
    ) -> Self {
        VariableFamily {
            name: name.into(),
            dims,
            kind: VarKind::Integer { lo, hi },
            description: description.into(),
        }
    }

    /// Number of cells.
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_boolean(&self) -> bool {
        matches!(self.kind, VarKind::Boolean)
    }

    pub fn bounds(&self) -> (S, S) {
        match self.kind {
            VarKind::Boolean => (S::zero(), S::one()),
            VarKind::Integer { lo, hi } => (lo, hi),
        }
    }

    /// Row-major offset of a multi-index, `None` when out of range or of the
    /// wrong arity.
    pub fn flat_index(&self, index: &[usize]) -> Option<usize> {
        flat_index(&self.dims, index)
    }

    pub fn unflatten(&self, flat: usize) -> Vec<usize> {
        unflatten(&self.dims, flat)
    }
}

pub(crate) fn flat_index(dims: &[usize], index: &[usize]) -> Option<usize> {
    if dims.len() != index.len() {
        return None;
    }
    let mut flat = 0usize;
    for (&d, &i) in dims.iter().zip(index) {
        if i >= d {
            return None;
        }
        flat = flat * d + i;
    }
    Some(flat)
}

pub(crate) fn unflatten(dims: &[usize], mut flat: usize) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = flat % d;
        flat /= d;
    }
    out
}

/// `Σ coef·var  relation  rhs`, with each variable appearing at most once.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearConstraint<S> {
    pub terms: Vec<(S, VarId)>,
    pub relation: Relation,
    pub rhs: S,
}

impl<S: Scalar> LinearConstraint<S> {
    /// Builds a constraint, merging repeated variables and dropping zero
    /// coefficients. Terms end up sorted by variable id.
    pub fn new(terms: impl IntoIterator<Item = (S, VarId)>, relation: Relation, rhs: S) -> Self {
        LinearConstraint {
            terms: merge_terms(terms),
            relation,
            rhs,
        }
    }

    pub fn activity(&self, values: &[S]) -> S {
        self.terms
            .iter()
            .fold(S::zero(), |acc, &(c, v)| acc + c * values[v.0])
    }

    pub fn holds(&self, values: &[S]) -> bool {
        self.relation.holds(self.activity(values), self.rhs)
    }
}

pub(crate) fn merge_terms<S: Scalar>(terms: impl IntoIterator<Item = (S, VarId)>) -> Vec<(S, VarId)> {
    let mut merged: BTreeMap<VarId, S> = BTreeMap::new();
    for (c, v) in terms {
        let slot = merged.entry(v).or_insert_with(S::zero);
        *slot = *slot + c;
    }
    merged
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(v, c)| (c, v))
        .collect()
}

/// `Σ coef·var + constant`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearExpr<S> {
    pub terms: Vec<(S, VarId)>,
    pub constant: S,
}

impl<S: Scalar> Default for LinearExpr<S> {
    fn default() -> Self {
        LinearExpr {
            terms: Vec::new(),
            constant: S::zero(),
        }
    }
}

impl<S: Scalar> LinearExpr<S> {
    pub fn new(terms: impl IntoIterator<Item = (S, VarId)>, constant: S) -> Self {
        LinearExpr {
            terms: merge_terms(terms),
            constant,
        }
    }

    pub fn value(&self, values: &[S]) -> S {
        self.terms
            .iter()
            .fold(self.constant, |acc, &(c, v)| acc + c * values[v.0])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstraintGroup<S> {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub constraints: Vec<LinearConstraint<S>>,
}

impl<S> ConstraintGroup<S> {
    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Objective<S> {
    pub sense: Sense,
    pub expr: LinearExpr<S>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue<S> {
    Scalar(S),
    Array { dims: Vec<usize>, values: Vec<S> },
}

impl<S: Scalar> ParamValue<S> {
    pub fn dims(&self) -> &[usize] {
        match self {
            ParamValue::Scalar(_) => &[],
            ParamValue::Array { dims, .. } => dims,
        }
    }

    pub fn as_scalar(&self) -> Option<S> {
        match self {
            ParamValue::Scalar(v) => Some(*v),
            ParamValue::Array { .. } => None,
        }
    }

    pub fn get(&self, index: &[usize]) -> Option<S> {
        match self {
            ParamValue::Scalar(v) if index.is_empty() => Some(*v),
            ParamValue::Scalar(_) => None,
            ParamValue::Array { dims, values } => flat_index(dims, index).map(|i| values[i]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Param<S> {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub value: ParamValue<S>,
}

/// A complete optimization model over bounded integer variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelIr<S> {
    pub name: String,
    /// Natural-language problem statement used when prompting agents.
    #[serde(default)]
    pub description: String,
    pub params: Vec<Param<S>>,
    pub families: Vec<VariableFamily<S>>,
    pub groups: Vec<ConstraintGroup<S>>,
    pub objective: Objective<S>,
}

/// Where a family lives in the global variable numbering.
#[derive(Debug, Clone, Copy)]
pub struct FamilyRef<'a, S> {
    pub offset: usize,
    pub family: &'a VariableFamily<S>,
}

impl<'a, S: Scalar> FamilyRef<'a, S> {
    pub fn var(&self, index: &[usize]) -> Option<VarId> {
        self.family.flat_index(index).map(|i| VarId(self.offset + i))
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> {
        let start = self.offset;
        (start..start + self.family.len()).map(VarId)
    }
}

impl<S: Scalar> ModelIr<S> {
    pub fn num_vars(&self) -> usize {
        self.families.iter().map(VariableFamily::len).sum()
    }

    pub fn family(&self, name: &str) -> Option<FamilyRef<'_, S>> {
        let mut offset = 0;
        for family in &self.families {
            if family.name == name {
                return Some(FamilyRef { offset, family });
            }
            offset += family.len();
        }
        None
    }

    /// Shorthand for `family(name)?.var(index)`.
    pub fn var(&self, name: &str, index: &[usize]) -> Option<VarId> {
        self.family(name)?.var(index)
    }

    pub fn param(&self, name: &str) -> Option<&Param<S>> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn group(&self, name: &str) -> Option<&ConstraintGroup<S>> {
        self.groups.iter().find(|g| g.name == name)
    }

    /// Family owning `var` together with the cell's multi-index.
    pub fn locate(&self, var: VarId) -> Option<(&VariableFamily<S>, Vec<usize>)> {
        let mut offset = 0;
        for family in &self.families {
            let len = family.len();
            if var.0 < offset + len {
                return Some((family, family.unflatten(var.0 - offset)));
            }
            offset += len;
        }
        None
    }

    /// Human-readable name such as `workerHours[1,3]`.
    pub fn var_name(&self, var: VarId) -> String {
        match self.locate(var) {
            Some((family, idx)) => {
                let idx: Vec<String> = idx.iter().map(usize::to_string).collect();
                format!("{}[{}]", family.name, idx.join(","))
            }
            None => format!("<var {}>", var.0),
        }
    }

    /// Per-variable bounds in id order.
    pub fn bounds(&self) -> Vec<(S, S)> {
        let mut out = Vec::with_capacity(self.num_vars());
        for family in &self.families {
            let b = family.bounds();
            out.extend(std::iter::repeat_n(b, family.len()));
        }
        out
    }

    pub fn num_constraints(&self) -> usize {
        self.groups.iter().map(ConstraintGroup::len).sum()
    }

    /// Checks the structural invariants: unique names, in-range variable
    /// references, ordered bounds and pre-merged terms.
    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.num_vars();
        let mut names = HashSet::new();
        for family in &self.families {
            if !names.insert(family.name.as_str()) {
                return Err(ModelError::Duplicate(family.name.clone()));
            }
            if family.dims.contains(&0) {
                return Err(ModelError::Invalid(format!(
                    "family `{}` has an empty dimension",
                    family.name
                )));
            }
            let (lo, hi) = family.bounds();
            if lo > hi {
                return Err(ModelError::Invalid(format!(
                    "family `{}` has lo > hi",
                    family.name
                )));
            }
        }
        let mut groups = HashSet::new();
        for group in &self.groups {
            if !groups.insert(group.name.as_str()) {
                return Err(ModelError::Duplicate(group.name.clone()));
            }
            for c in &group.constraints {
                check_terms(&c.terms, n, &group.name)?;
            }
        }
        check_terms(&self.objective.expr.terms, n, "objective")?;
        Ok(())
    }
}

fn check_terms<S: Scalar>(terms: &[(S, VarId)], n: usize, owner: &str) -> Result<(), ModelError> {
    let mut seen = HashSet::new();
    for &(_, v) in terms {
        if v.0 >= n {
            return Err(ModelError::Invalid(format!(
                "{owner} references variable {} beyond {n}",
                v.0
            )));
        }
        if !seen.insert(v) {
            return Err(ModelError::Invalid(format!(
                "{owner} repeats variable {} in one constraint",
                v.0
            )));
        }
    }
    Ok(())
}
