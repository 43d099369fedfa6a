//! Name resolution, shape checks and the linearity check.
//!
//! Names resolve in this order: quantifier indices, parameters declared in
//! the patch, variables declared in the patch, model variable families,
//! model parameters, then any other key of the instance data.

use std::collections::{BTreeMap, BTreeSet};

use dynsched_core::{Instance, ModelError, ModelIr, ParamValue, Scalar, VariableFamily};
use serde::{Deserialize, Serialize};

use crate::ast::*;
use crate::error::DslError;

/// A parsed patch whose names all resolve. Carries the numeric values the
/// grounder needs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct BoundPatch<S> {
    pub patch: Patch,
    /// Every parameter the patch refers to, by name.
    pub params: BTreeMap<String, ParamValue<S>>,
    /// Parameters declared in the patch that the model does not already have.
    pub new_params: Vec<String>,
    /// Variable families declared in the patch, with evaluated dimensions.
    pub families: Vec<VariableFamily<S>>,
    pub relaxed: Vec<String>,
    pub base_num_vars: usize,
}

#[derive(Debug, Clone)]
enum Sym<'a> {
    Index,
    Param(Vec<usize>),
    Var { dims: &'a [usize], boolean: bool },
}

struct Binder<'a, S> {
    model: &'a ModelIr<S>,
    instance: &'a Instance,
    params: BTreeMap<String, ParamValue<S>>,
    declared_params: BTreeSet<String>,
    families: Vec<VariableFamily<S>>,
    scope: Vec<String>,
}

pub fn bind<S: Scalar>(patch: &Patch, model: &ModelIr<S>, instance: &Instance) -> Result<BoundPatch<S>, DslError> {
    let mut b = Binder {
        model,
        instance,
        params: BTreeMap::new(),
        declared_params: BTreeSet::new(),
        families: Vec::new(),
        scope: Vec::new(),
    };
    let mut relaxed = Vec::new();
    let mut new_params = Vec::new();
    let mut names = BTreeSet::new();

    for decl in &patch.decls {
        if let Some(id) = decl.kind.declared_name() {
            if !names.insert(id.name.clone()) {
                return Err(dup(id));
            }
        }
        match &decl.kind {
            DeclKind::Param(p) => {
                if model.family(&p.name.name).is_some() {
                    return Err(dup(&p.name));
                }
                let value = b.lookup_data(&p.name)?;
                if let Some(dims) = &p.dims {
                    let declared = dims
                        .iter()
                        .map(|e| b.const_extent(e))
                        .collect::<Result<Vec<_>, _>>()?;
                    if declared != value.dims() {
                        return Err(DslError::ShapeMismatch {
                            name: p.name.name.clone(),
                            declared,
                            actual: value.dims().to_vec(),
                            span: decl.span,
                        });
                    }
                }
                if model.param(&p.name.name).is_none() {
                    new_params.push(p.name.name.clone());
                }
                b.params.insert(p.name.name.clone(), value);
                b.declared_params.insert(p.name.name.clone());
            }
            DeclKind::Var(v) => {
                if model.family(&v.name.name).is_some() || model.param(&v.name.name).is_some() {
                    return Err(dup(&v.name));
                }
                let dims = v
                    .dims
                    .iter()
                    .map(|e| b.const_extent(e))
                    .collect::<Result<Vec<_>, _>>()?;
                let family = match v.ty {
                    VarType::Bool => VariableFamily::boolean(&v.name.name, dims, ""),
                    VarType::Int { lo, hi } => {
                        if lo > hi {
                            return Err(DslError::TypeError {
                                message: format!("empty domain int({lo}, {hi})"),
                                span: decl.span,
                            });
                        }
                        let conv = |x: i64| S::from_i64(x).ok_or(DslError::Overflow { span: decl.span });
                        VariableFamily::integer(&v.name.name, dims, conv(lo)?, conv(hi)?, "")
                    }
                };
                b.families.push(family);
            }
            DeclKind::Relax(name) => {
                if model.group(&name.name).is_none() {
                    return Err(DslError::UnknownGroup {
                        name: name.name.clone(),
                        span: name.span,
                    });
                }
                if !relaxed.contains(&name.name) {
                    relaxed.push(name.name.clone());
                }
            }
            DeclKind::Constraint(c) => {
                b.check_binders(&c.binders, |b| {
                    b.degree(&c.lhs)?;
                    b.degree(&c.rhs)?;
                    Ok(())
                })?;
            }
        }
    }

    Ok(BoundPatch {
        patch: patch.clone(),
        params: b.params,
        new_params,
        families: b.families,
        relaxed,
        base_num_vars: model.num_vars(),
    })
}

fn dup(id: &Ident) -> DslError {
    DslError::DuplicateName {
        name: id.name.clone(),
        span: id.span,
    }
}

impl<S: Scalar> Binder<'_, S> {
    /// Value of a data name: instance first, then the model's parameters.
    fn lookup_data(&self, id: &Ident) -> Result<ParamValue<S>, DslError> {
        if self.instance.contains(&id.name) {
            return self.instance.param_value::<S>(&id.name).map_err(|e| match e {
                ModelError::Schema { reason, .. } if reason.contains("overflow") => DslError::Overflow { span: id.span },
                other => DslError::TypeError {
                    message: other.to_string(),
                    span: id.span,
                },
            });
        }
        if let Some(p) = self.model.param(&id.name) {
            return Ok(p.value.clone());
        }
        Err(DslError::UnknownParameter {
            name: id.name.clone(),
            span: id.span,
        })
    }

    fn resolve(&mut self, id: &Ident, indexed: bool) -> Result<Sym<'_>, DslError> {
        let name = id.name.as_str();
        if self.scope.iter().any(|s| s == name) {
            return Ok(Sym::Index);
        }
        if self.declared_params.contains(name) {
            return Ok(Sym::Param(self.params[name].dims().to_vec()));
        }
        if let Some(f) = self.families.iter().find(|f| f.name == name) {
            return Ok(Sym::Var {
                dims: &f.dims,
                boolean: f.is_boolean(),
            });
        }
        if let Some(f) = self.model.family(name) {
            return Ok(Sym::Var {
                dims: &f.family.dims,
                boolean: f.family.is_boolean(),
            });
        }
        if self.model.param(name).is_some() || self.instance.contains(name) {
            let value = self.lookup_data(id)?;
            let dims = value.dims().to_vec();
            self.params.insert(name.to_string(), value);
            return Ok(Sym::Param(dims));
        }
        Err(if indexed {
            DslError::UnknownVariable {
                name: id.name.clone(),
                span: id.span,
            }
        } else {
            DslError::UnknownParameter {
                name: id.name.clone(),
                span: id.span,
            }
        })
    }

    /// True if `name` is already visible, so a quantifier index would shadow it.
    fn visible(&self, name: &str) -> bool {
        self.scope.iter().any(|s| s == name)
            || self.declared_params.contains(name)
            || self.families.iter().any(|f| f.name == name)
            || self.model.family(name).is_some()
            || self.model.param(name).is_some()
    }

    /// Declared dimension: a non-negative constant built from literals and
    /// scalar parameters.
    fn const_extent(&mut self, e: &Expr) -> Result<usize, DslError> {
        let v = self.const_eval(e)?;
        usize::try_from(v).map_err(|_| DslError::TypeError {
            message: format!("dimension evaluates to {v}"),
            span: e.span,
        })
    }

    fn const_eval(&mut self, e: &Expr) -> Result<i128, DslError> {
        let overflow = DslError::Overflow { span: e.span };
        match &e.kind {
            ExprKind::Int(v) => Ok(*v as i128),
            ExprKind::Ref { name, args: None } => match self.resolve(name, false)? {
                Sym::Param(dims) if dims.is_empty() => Ok(self.params[&name.name].as_scalar().expect("scalar").widen()),
                _ => Err(DslError::TypeError {
                    message: format!("`{}` is not a scalar constant", name.name),
                    span: e.span,
                }),
            },
            ExprKind::Neg(inner) => self.const_eval(inner)?.checked_neg().ok_or(overflow),
            ExprKind::Binary { op, lhs, rhs } => {
                let (l, r) = (self.const_eval(lhs)?, self.const_eval(rhs)?);
                match op {
                    BinOp::Add => l.checked_add(r),
                    BinOp::Sub => l.checked_sub(r),
                    BinOp::Mul => l.checked_mul(r),
                }
                .ok_or(overflow)
            }
            _ => Err(DslError::TypeError {
                message: "expected a constant expression".into(),
                span: e.span,
            }),
        }
    }

    /// Checks binder domains left to right, brings each index into scope,
    /// runs `body`, then pops the indices again.
    fn check_binders(
        &mut self,
        binders: &[crate::ast::Binder],
        body: impl FnOnce(&mut Self) -> Result<(), DslError>,
    ) -> Result<(), DslError> {
        let depth = self.scope.len();
        let result = (|| {
            for bd in binders {
                match &bd.domain {
                    Domain::Range(lo, hi) => {
                        self.constant(lo)?;
                        self.constant(hi)?;
                    }
                    Domain::Extent(n) => match self.resolve(n, false)? {
                        Sym::Param(dims) if dims.is_empty() => {}
                        _ => {
                            return Err(DslError::TypeError {
                                message: format!("`{}` is not a scalar extent", n.name),
                                span: n.span,
                            })
                        }
                    },
                }
                if self.visible(&bd.name.name) {
                    return Err(dup(&bd.name));
                }
                self.scope.push(bd.name.name.clone());
            }
            body(self)
        })();
        self.scope.truncate(depth);
        result
    }

    fn constant(&mut self, e: &Expr) -> Result<(), DslError> {
        if self.degree(e)? > 0 {
            return Err(DslError::TypeError {
                message: "indices and ranges must not depend on decision variables".into(),
                span: e.span,
            });
        }
        Ok(())
    }

    /// Polynomial degree in the decision variables; errors on anything above
    /// one.
    fn degree(&mut self, e: &Expr) -> Result<u8, DslError> {
        match &e.kind {
            ExprKind::Int(_) => Ok(0),
            ExprKind::Ref { name, args } => {
                let found = args.as_ref().map_or(0, Vec::len);
                let (dims_len, deg) = match self.resolve(name, args.is_some())? {
                    Sym::Index => (0, 0),
                    Sym::Param(dims) => (dims.len(), 0),
                    Sym::Var { dims, .. } => (dims.len(), 1),
                };
                if dims_len != found {
                    return Err(DslError::ArityMismatch {
                        name: name.name.clone(),
                        expected: dims_len,
                        found,
                        span: e.span,
                    });
                }
                for a in args.iter().flatten() {
                    self.constant(a)?;
                }
                Ok(deg)
            }
            ExprKind::Sum { binders, body } => {
                let mut deg = 0;
                self.check_binders(binders, |b| {
                    deg = b.degree(body)?;
                    Ok(())
                })?;
                Ok(deg)
            }
            ExprKind::Hamming { var, reference } => {
                let (dims, boolean) = match self.resolve(var, true)? {
                    Sym::Var { dims, boolean } => (dims.to_vec(), boolean),
                    _ => {
                        return Err(DslError::TypeError {
                            message: format!("`{}` is not a variable family", var.name),
                            span: var.span,
                        })
                    }
                };
                if !boolean {
                    return Err(DslError::TypeError {
                        message: format!("hamming needs a boolean family, `{}` is not", var.name),
                        span: var.span,
                    });
                }
                let rdims = match self.resolve(reference, true)? {
                    Sym::Param(d) => d,
                    _ => {
                        return Err(DslError::TypeError {
                            message: format!("`{}` is not a parameter array", reference.name),
                            span: reference.span,
                        })
                    }
                };
                if rdims != dims {
                    return Err(DslError::ShapeMismatch {
                        name: reference.name.clone(),
                        declared: dims,
                        actual: rdims,
                        span: reference.span,
                    });
                }
                let binary = match &self.params[&reference.name] {
                    ParamValue::Scalar(v) => *v == S::zero() || *v == S::one(),
                    ParamValue::Array { values, .. } => values.iter().all(|v| *v == S::zero() || *v == S::one()),
                };
                if !binary {
                    return Err(DslError::TypeError {
                        message: format!("hamming reference `{}` must hold only 0 and 1", reference.name),
                        span: reference.span,
                    });
                }
                Ok(1)
            }
            ExprKind::Neg(inner) => self.degree(inner),
            ExprKind::Binary { op, lhs, rhs } => {
                let (l, r) = (self.degree(lhs)?, self.degree(rhs)?);
                match op {
                    BinOp::Mul if l + r > 1 => Err(DslError::NonlinearTerm { span: e.span }),
                    BinOp::Mul => Ok(l + r),
                    _ => Ok(l.max(r)),
                }
            }
        }
    }
}
