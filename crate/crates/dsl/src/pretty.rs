use std::fmt::Write;

use crate::ast::*;

/// Canonical text of a patch, one declaration per line. Parentheses are
/// emitted only where precedence or associativity needs them.
pub fn pretty_print(patch: &Patch) -> String {
    let mut out = String::new();
    for d in &patch.decls {
        out.push_str(&decl(d));
        out.push('\n');
    }
    out
}

pub fn decl(d: &Decl) -> String {
    match &d.kind {
        DeclKind::Param(p) => match &p.dims {
            Some(dims) => format!("param {}[{}]", p.name.name, list(dims)),
            None => format!("param {}", p.name.name),
        },
        DeclKind::Var(v) => {
            let ty = match v.ty {
                VarType::Bool => "bool".to_string(),
                VarType::Int { lo, hi } => format!("int({lo}, {hi})"),
            };
            format!("var {}[{}]: {ty}", v.name.name, list(&v.dims))
        }
        DeclKind::Relax(name) => format!("relax {}", name.name),
        DeclKind::Constraint(c) => {
            let mut s = String::from("constraint ");
            if !c.binders.is_empty() {
                let _ = write!(s, "forall {}: ", binders(&c.binders));
            }
            let _ = write!(s, "{} {} {}", expr(&c.lhs), c.cmp.symbol(), expr(&c.rhs));
            s
        }
    }
}

fn list(es: &[Expr]) -> String {
    es.iter().map(expr).collect::<Vec<_>>().join(", ")
}

fn binders(bs: &[Binder]) -> String {
    bs.iter()
        .map(|b| match &b.domain {
            Domain::Range(lo, hi) => format!("{} in {}..{}", b.name.name, expr(lo), expr(hi)),
            Domain::Extent(n) => format!("{} in {}", b.name.name, n.name),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

const ADD: u8 = 1;
const MUL: u8 = 2;
const UNARY: u8 = 3;
const ATOM: u8 = 4;

fn precedence(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Binary { op: BinOp::Add | BinOp::Sub, .. } => ADD,
        ExprKind::Binary { op: BinOp::Mul, .. } => MUL,
        ExprKind::Neg(_) => UNARY,
        _ => ATOM,
    }
}

pub fn expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, ADD);
    s
}

fn write_expr(out: &mut String, e: &Expr, min: u8) {
    let wrap = precedence(e) < min;
    if wrap {
        out.push('(');
    }
    match &e.kind {
        ExprKind::Int(v) => {
            let _ = write!(out, "{v}");
        }
        ExprKind::Ref { name, args } => {
            out.push_str(&name.name);
            if let Some(args) = args {
                let _ = write!(out, "[{}]", list(args));
            }
        }
        ExprKind::Sum { binders: bs, body } => {
            let _ = write!(out, "sum({} : {})", binders(bs), expr(body));
        }
        ExprKind::Hamming { var, reference } => {
            let _ = write!(out, "hamming({}, {})", var.name, reference.name);
        }
        ExprKind::Neg(inner) => {
            out.push('-');
            write_expr(out, inner, UNARY);
        }
        ExprKind::Binary { op, lhs, rhs } => {
            // Left-associative: the right operand needs one level more.
            let level = if *op == BinOp::Mul { MUL } else { ADD };
            write_expr(out, lhs, level);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, rhs, level + 1);
        }
    }
    if wrap {
        out.push(')');
    }
}
