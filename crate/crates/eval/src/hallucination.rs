//! Names a patch uses that exist nowhere.

use std::collections::BTreeSet;

use dynsched_core::{Instance, Model};
use dynsched_dsl::ast::{Binder, DeclKind, Domain, Expr, ExprKind};
use dynsched_dsl::Patch;

struct Known<'a> {
    model: &'a Model,
    instance: &'a Instance,
    patch_vars: BTreeSet<&'a str>,
}

impl Known<'_> {
    fn data(&self, name: &str) -> bool {
        self.instance.contains(name) || self.model.param(name).is_some()
    }

    fn any(&self, name: &str) -> bool {
        self.data(name) || self.model.family(name).is_some() || self.patch_vars.contains(name)
    }
}

/// Parameters the patch declares or references that neither the instance
/// data nor the model provides, plus references to undefined families.
/// Sorted and deduplicated.
pub fn detect_hallucinated_params(patch: &Patch, instance: &Instance, model: &Model) -> Vec<String> {
    let known = Known {
        model,
        instance,
        patch_vars: patch
            .decls
            .iter()
            .filter_map(|d| match &d.kind {
                DeclKind::Var(v) => Some(v.name.name.as_str()),
                _ => None,
            })
            .collect(),
    };
    let mut out = BTreeSet::new();
    let mut scope = Vec::new();
    for d in &patch.decls {
        match &d.kind {
            DeclKind::Param(p) => {
                if !known.data(&p.name.name) {
                    out.insert(p.name.name.clone());
                }
                for e in p.dims.iter().flatten() {
                    walk(e, &known, &mut scope, &mut out);
                }
            }
            DeclKind::Var(v) => v.dims.iter().for_each(|e| walk(e, &known, &mut scope, &mut out)),
            DeclKind::Constraint(c) => {
                let depth = scope.len();
                binders(&c.binders, &known, &mut scope, &mut out);
                walk(&c.lhs, &known, &mut scope, &mut out);
                walk(&c.rhs, &known, &mut scope, &mut out);
                scope.truncate(depth);
            }
            DeclKind::Relax(_) => {}
        }
    }
    out.into_iter().collect()
}

fn binders<'a>(bs: &'a [Binder], known: &Known, scope: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
    for b in bs {
        match &b.domain {
            Domain::Range(lo, hi) => {
                walk(lo, known, scope, out);
                walk(hi, known, scope, out);
            }
            Domain::Extent(id) => name(&id.name, known, scope, out),
        }
        scope.push(&b.name.name);
    }
}

fn name(n: &str, known: &Known, scope: &[&str], out: &mut BTreeSet<String>) {
    if !scope.contains(&n) && !known.any(n) {
        out.insert(n.to_string());
    }
}

fn walk<'a>(e: &'a Expr, known: &Known, scope: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
    match &e.kind {
        ExprKind::Int(_) => {}
        ExprKind::Ref { name: id, args } => {
            name(&id.name, known, scope, out);
            for a in args.iter().flatten() {
                walk(a, known, scope, out);
            }
        }
        ExprKind::Sum { binders: bs, body } => {
            let depth = scope.len();
            binders(bs, known, scope, out);
            walk(body, known, scope, out);
            scope.truncate(depth);
        }
        ExprKind::Hamming { var, reference } => {
            name(&var.name, known, scope, out);
            name(&reference.name, known, scope, out);
        }
        ExprKind::Neg(x) => walk(x, known, scope, out),
        ExprKind::Binary { lhs, rhs, .. } => {
            walk(lhs, known, scope, out);
            walk(rhs, known, scope, out);
        }
    }
}
