//! Expansion of a bound patch into explicit linear constraints.

use std::collections::BTreeMap;

use dynsched_core::{
    ConstraintGroup, GroundedPatch, LinearConstraint, ModelIr, Param, ParamValue, Relation, Scalar, VarId,
    VariableFamily,
};
use serde::{Deserialize, Serialize};

use crate::ast::*;
use crate::bind::BoundPatch;
use crate::error::{DslError, DslWarning};

/// Grounding result: the numeric patch plus non-fatal findings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Grounded<S> {
    pub patch: GroundedPatch<S>,
    pub warnings: Vec<DslWarning>,
}

/// Affine form `sum(coef * var) + constant` with wide coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Affine {
    pub terms: BTreeMap<VarId, i128>,
    pub constant: i128,
}

impl Affine {
    fn constant(c: i128) -> Self {
        Affine {
            terms: BTreeMap::new(),
            constant: c,
        }
    }

    fn var(v: VarId) -> Self {
        let mut a = Affine::default();
        a.terms.insert(v, 1);
        a
    }

    fn is_constant(&self) -> bool {
        self.terms.values().all(|c| *c == 0)
    }

    fn add_scaled(&mut self, other: &Affine, k: i128, span: Span) -> Result<(), DslError> {
        let of = DslError::Overflow { span };
        for (v, c) in &other.terms {
            let slot = self.terms.entry(*v).or_insert(0);
            *slot = c.checked_mul(k).and_then(|x| slot.checked_add(x)).ok_or_else(|| of.clone())?;
        }
        self.constant = other
            .constant
            .checked_mul(k)
            .and_then(|x| self.constant.checked_add(x))
            .ok_or(of)?;
        Ok(())
    }

    fn scaled(&self, k: i128, span: Span) -> Result<Affine, DslError> {
        let mut out = Affine::default();
        out.add_scaled(self, k, span)?;
        Ok(out)
    }

    /// Value under a full assignment of wide values.
    pub fn value(&self, values: &[i128]) -> i128 {
        self.terms.iter().map(|(v, c)| c * values[v.index()]).sum::<i128>() + self.constant
    }
}

struct Grounder<'a, S> {
    bound: &'a BoundPatch<S>,
    /// Name, offset, family for every family visible to the patch.
    families: Vec<(&'a str, usize, &'a VariableFamily<S>)>,
    env: Vec<(String, i64)>,
    warnings: Vec<DslWarning>,
}

pub fn ground<S: Scalar>(bound: &BoundPatch<S>, model: &ModelIr<S>) -> Result<Grounded<S>, DslError> {
    let mut families = Vec::new();
    let mut offset = bound.base_num_vars;
    for f in &bound.families {
        families.push((f.name.as_str(), offset, f));
        offset += f.len();
    }
    let mut base = 0;
    for f in &model.families {
        families.push((f.name.as_str(), base, f));
        base += f.len();
    }
    let mut g = Grounder {
        bound,
        families,
        env: Vec::new(),
        warnings: Vec::new(),
    };

    let mut patch = GroundedPatch {
        base_num_vars: bound.base_num_vars,
        params: bound
            .new_params
            .iter()
            .map(|n| Param {
                name: n.clone(),
                description: String::new(),
                value: bound.params[n].clone(),
            })
            .collect(),
        families: bound.families.clone(),
        groups: Vec::new(),
        relaxed: bound.relaxed.clone(),
    };

    let mut next = 1;
    for decl in &bound.patch.decls {
        let DeclKind::Constraint(c) = &decl.kind else { continue };
        let mut rows = Vec::new();
        g.expand(&c.binders, &mut |g| {
            let mut diff = g.affine(&c.lhs)?;
            let rhs = g.affine(&c.rhs)?;
            diff.add_scaled(&rhs, -1, decl.span)?;
            rows.push(to_row::<S>(&diff, c.cmp, decl.span)?);
            Ok(())
        })?;
        let name = loop {
            let candidate = format!("Dynamic{next}");
            next += 1;
            if model.group(&candidate).is_none() {
                break candidate;
            }
        };
        patch.groups.push(ConstraintGroup {
            name,
            description: bound.patch.text_of(decl.span).trim().to_string(),
            constraints: rows,
        });
    }
    Ok(Grounded {
        patch,
        warnings: g.warnings,
    })
}

fn to_row<S: Scalar>(diff: &Affine, cmp: Cmp, span: Span) -> Result<LinearConstraint<S>, DslError> {
    let narrow = |v: i128| S::narrow(v).ok_or(DslError::Overflow { span });
    let terms = diff
        .terms
        .iter()
        .filter(|(_, c)| **c != 0)
        .map(|(v, c)| Ok((narrow(*c)?, *v)))
        .collect::<Result<Vec<_>, DslError>>()?;
    let rhs = narrow(diff.constant.checked_neg().ok_or(DslError::Overflow { span })?)?;
    let relation = match cmp {
        Cmp::Le => Relation::Le,
        Cmp::Ge => Relation::Ge,
        Cmp::Eq => Relation::Eq,
    };
    Ok(LinearConstraint::new(terms, relation, rhs))
}

impl<'a, S: Scalar> Grounder<'a, S> {
    /// Runs `f` once per point of the binders' product, in lexicographic
    /// order. Later ranges may depend on earlier indices.
    fn expand(
        &mut self,
        binders: &[crate::ast::Binder],
        f: &mut dyn FnMut(&mut Self) -> Result<(), DslError>,
    ) -> Result<(), DslError> {
        let Some((first, rest)) = binders.split_first() else {
            return f(self);
        };
        let (lo, hi) = self.range(first)?;
        if lo >= hi {
            self.warnings.push(DslWarning::EmptyRange { span: first.span });
            return Ok(());
        }
        for i in lo..hi {
            self.env.push((first.name.name.clone(), i));
            let r = self.expand(rest, f);
            self.env.pop();
            r?;
        }
        Ok(())
    }

    fn range(&mut self, b: &crate::ast::Binder) -> Result<(i64, i64), DslError> {
        let (lo, hi) = match &b.domain {
            Domain::Range(lo, hi) => (self.int(lo)?, self.int(hi)?),
            Domain::Extent(n) => (0, self.scalar_param(n)?),
        };
        let fit = |v: i128| i64::try_from(v).map_err(|_| DslError::Overflow { span: b.span });
        Ok((fit(lo)?, fit(hi)?))
    }

    fn scalar_param(&self, id: &Ident) -> Result<i128, DslError> {
        self.bound
            .params
            .get(&id.name)
            .and_then(ParamValue::as_scalar)
            .map(Scalar::widen)
            .ok_or_else(|| DslError::UnknownParameter {
                name: id.name.clone(),
                span: id.span,
            })
    }

    fn int(&mut self, e: &Expr) -> Result<i128, DslError> {
        let a = self.affine(e)?;
        if !a.is_constant() {
            return Err(DslError::TypeError {
                message: "expected a constant expression".into(),
                span: e.span,
            });
        }
        Ok(a.constant)
    }

    fn indices(&mut self, name: &str, args: &[Expr], dims: &[usize], span: Span) -> Result<Vec<usize>, DslError> {
        let mut raw = Vec::with_capacity(args.len());
        for a in args {
            raw.push(self.int(a)?);
        }
        let ok = raw.len() == dims.len() && raw.iter().zip(dims).all(|(i, d)| *i >= 0 && (*i as u128) < *d as u128);
        if !ok {
            return Err(DslError::BoundsViolation {
                name: name.to_string(),
                index: raw.iter().map(|&i| i.clamp(i64::MIN as i128, i64::MAX as i128) as i64).collect(),
                dims: dims.to_vec(),
                span,
            });
        }
        Ok(raw.into_iter().map(|i| i as usize).collect())
    }

    fn family(&self, name: &str) -> Option<(usize, &'a VariableFamily<S>)> {
        self.families
            .iter()
            .find(|(n, _, _)| *n == name)
            .map(|(_, off, f)| (*off, *f))
    }

    fn affine(&mut self, e: &Expr) -> Result<Affine, DslError> {
        match &e.kind {
            ExprKind::Int(v) => Ok(Affine::constant(*v as i128)),
            ExprKind::Ref { name, args } => {
                let n = name.name.as_str();
                if args.is_none() {
                    if let Some((_, v)) = self.env.iter().rev().find(|(b, _)| b == n) {
                        return Ok(Affine::constant(*v as i128));
                    }
                }
                let args = args.as_deref().unwrap_or(&[]);
                if let Some((offset, fam)) = self.family(n) {
                    let dims = fam.dims.clone();
                    let idx = self.indices(n, args, &dims, e.span)?;
                    let flat = fam.flat_index(&idx).expect("checked");
                    return Ok(Affine::var(VarId(offset + flat)));
                }
                let bound = self.bound;
                let value = bound.params.get(n).ok_or_else(|| DslError::UnknownParameter {
                    name: n.to_string(),
                    span: name.span,
                })?;
                let idx = self.indices(n, args, value.dims(), e.span)?;
                Ok(Affine::constant(value.get(&idx).expect("checked").widen()))
            }
            ExprKind::Sum { binders, body } => {
                let mut total = Affine::default();
                let span = e.span;
                self.expand(binders, &mut |g| {
                    let term = g.affine(body)?;
                    total.add_scaled(&term, 1, span)
                })?;
                Ok(total)
            }
            ExprKind::Hamming { var, reference } => {
                let (offset, fam) = self.family(&var.name).ok_or_else(|| DslError::UnknownVariable {
                    name: var.name.clone(),
                    span: var.span,
                })?;
                let value = self.bound.params.get(&reference.name).ok_or_else(|| DslError::UnknownParameter {
                    name: reference.name.clone(),
                    span: reference.span,
                })?;
                let refs: Vec<S> = match value {
                    ParamValue::Array { values, .. } => values.clone(),
                    ParamValue::Scalar(v) => vec![*v],
                };
                if refs.len() != fam.len() {
                    return Err(DslError::ShapeMismatch {
                        name: reference.name.clone(),
                        declared: fam.dims.clone(),
                        actual: value.dims().to_vec(),
                        span: reference.span,
                    });
                }
                // |x - c| is 1 - x where c = 1 and x where c = 0.
                let mut out = Affine::default();
                for (cell, c) in refs.iter().enumerate() {
                    let v = VarId(offset + cell);
                    if *c == S::one() {
                        out.terms.insert(v, -1);
                        out.constant += 1;
                    } else {
                        out.terms.insert(v, 1);
                    }
                }
                Ok(out)
            }
            ExprKind::Neg(inner) => self.affine(inner)?.scaled(-1, e.span),
            ExprKind::Binary { op, lhs, rhs } => {
                let l = self.affine(lhs)?;
                let r = self.affine(rhs)?;
                match op {
                    BinOp::Add => {
                        let mut out = l;
                        out.add_scaled(&r, 1, e.span)?;
                        Ok(out)
                    }
                    BinOp::Sub => {
                        let mut out = l;
                        out.add_scaled(&r, -1, e.span)?;
                        Ok(out)
                    }
                    BinOp::Mul if l.is_constant() => r.scaled(l.constant, e.span),
                    BinOp::Mul if r.is_constant() => l.scaled(r.constant, e.span),
                    BinOp::Mul => Err(DslError::NonlinearTerm { span: e.span }),
                }
            }
        }
    }
}
