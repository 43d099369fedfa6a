//! Syntax tree of a constraint patch.
//!
//! Every node records the byte range it was parsed from. Structural
//! comparisons (e.g. the print/parse round trip) go through
//! [`Patch::without_spans`], which zeroes them.

use serde::{Deserialize, Serialize};

/// Half-open byte range into the patch source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }

    /// 1-based line and column of the span start.
    pub fn line_col(self, source: &str) -> (usize, usize) {
        let upto = &source[..self.start.min(source.len())];
        let line = upto.matches('\n').count() + 1;
        let col = upto.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Self {
        Ident {
            name: name.into(),
            span: Span::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Patch {
    pub decls: Vec<Decl>,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decl {
    pub kind: DeclKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeclKind {
    Param(ParamDecl),
    Var(VarDecl),
    Constraint(ConstraintDecl),
    Relax(Ident),
}

impl DeclKind {
    /// Name introduced by the declaration, if any.
    pub fn declared_name(&self) -> Option<&Ident> {
        match self {
            DeclKind::Param(p) => Some(&p.name),
            DeclKind::Var(v) => Some(&v.name),
            _ => None,
        }
    }
}

/// `param NAME` or `param NAME[d1, d2, ...]`; the value comes from instance
/// data (or an existing model parameter) of the same name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamDecl {
    pub name: Ident,
    pub dims: Option<Vec<Expr>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarDecl {
    pub name: Ident,
    pub dims: Vec<Expr>,
    pub ty: VarType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarType {
    Bool,
    Int { lo: i64, hi: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintDecl {
    pub binders: Vec<Binder>,
    pub lhs: Expr,
    pub cmp: Cmp,
    pub rhs: Expr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

impl Cmp {
    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Le => "<=",
            Cmp::Ge => ">=",
            Cmp::Eq => "==",
        }
    }
}

/// `name in lo..hi` (half-open) or `name in N`, meaning `0..N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Binder {
    pub name: Ident,
    pub domain: Domain,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    Range(Expr, Expr),
    Extent(Ident),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExprKind {
    /// Non-negative literal; negative numbers parse as [`ExprKind::Neg`].
    Int(i64),
    /// Scalar reference (`args` is `None`) or indexed reference.
    Ref { name: Ident, args: Option<Vec<Expr>> },
    Sum { binders: Vec<Binder>, body: Box<Expr> },
    /// Cellwise distance between a boolean family and a 0/1 array.
    Hamming { var: Ident, reference: Ident },
    Neg(Box<Expr>),
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr {
            kind,
            span: Span::default(),
        }
    }

    pub fn int(v: i64) -> Self {
        Expr::new(ExprKind::Int(v))
    }

    pub fn name(n: &str) -> Self {
        Expr::new(ExprKind::Ref {
            name: Ident::new(n),
            args: None,
        })
    }

    pub fn index(n: &str, args: Vec<Expr>) -> Self {
        Expr::new(ExprKind::Ref {
            name: Ident::new(n),
            args: Some(args),
        })
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::new(ExprKind::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        })
    }
}

impl Patch {
    /// Copy with every span zeroed and the source text dropped.
    pub fn without_spans(&self) -> Patch {
        let mut p = self.clone();
        p.source.clear();
        for d in &mut p.decls {
            d.span = Span::default();
            match &mut d.kind {
                DeclKind::Param(pd) => {
                    pd.name.span = Span::default();
                    for e in pd.dims.iter_mut().flatten() {
                        strip_expr(e);
                    }
                }
                DeclKind::Var(vd) => {
                    vd.name.span = Span::default();
                    vd.dims.iter_mut().for_each(strip_expr);
                }
                DeclKind::Constraint(c) => {
                    c.binders.iter_mut().for_each(strip_binder);
                    strip_expr(&mut c.lhs);
                    strip_expr(&mut c.rhs);
                }
                DeclKind::Relax(id) => id.span = Span::default(),
            }
        }
        p
    }

    /// Structural equality ignoring spans and source text.
    pub fn same_structure(&self, other: &Patch) -> bool {
        self.without_spans() == other.without_spans()
    }

    pub fn constraints(&self) -> impl Iterator<Item = &ConstraintDecl> {
        self.decls.iter().filter_map(|d| match &d.kind {
            DeclKind::Constraint(c) => Some(c),
            _ => None,
        })
    }

    /// Source text of one declaration.
    pub fn text_of(&self, span: Span) -> &str {
        self.source.get(span.start..span.end).unwrap_or("")
    }
}

fn strip_binder(b: &mut Binder) {
    b.span = Span::default();
    b.name.span = Span::default();
    match &mut b.domain {
        Domain::Range(lo, hi) => {
            strip_expr(lo);
            strip_expr(hi);
        }
        Domain::Extent(id) => id.span = Span::default(),
    }
}

fn strip_expr(e: &mut Expr) {
    e.span = Span::default();
    match &mut e.kind {
        ExprKind::Int(_) => {}
        ExprKind::Ref { name, args } => {
            name.span = Span::default();
            args.iter_mut().flatten().for_each(strip_expr);
        }
        ExprKind::Sum { binders, body } => {
            binders.iter_mut().for_each(strip_binder);
            strip_expr(body);
        }
        ExprKind::Hamming { var, reference } => {
            var.span = Span::default();
            reference.span = Span::default();
        }
        ExprKind::Neg(inner) => strip_expr(inner),
        ExprKind::Binary { lhs, rhs, .. } => {
            strip_expr(lhs);
            strip_expr(rhs);
        }
    }
}
