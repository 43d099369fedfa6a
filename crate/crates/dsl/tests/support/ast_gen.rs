//! Random patch trees for round-trip checks.

use dynsched_dsl::ast::*;
use dynsched_dsl::keywords;
use proptest::prelude::*;

pub fn ident() -> impl Strategy<Value = String> {
    "[a-zA-Z_][a-zA-Z0-9_]{0,5}".prop_filter("keyword", |s| !keywords().contains(&s.as_str()))
}

pub fn binder(e: BoxedStrategy<Expr>) -> impl Strategy<Value = Binder> {
    let range = (e.clone(), e).prop_map(|(lo, hi)| Domain::Range(lo, hi));
    let extent = ident().prop_map(|n| Domain::Extent(Ident::new(n)));
    (ident(), prop_oneof![range, extent]).prop_map(|(n, domain)| Binder {
        name: Ident::new(n),
        domain,
        span: Span::default(),
    })
}

pub fn expr() -> BoxedStrategy<Expr> {
    let leaf = prop_oneof![
        (0i64..1000).prop_map(Expr::int),
        ident().prop_map(|n| Expr::name(&n)),
    ];
    leaf.prop_recursive(4, 40, 3, |inner| {
        prop_oneof![
            (ident(), prop::collection::vec(inner.clone(), 1..4)).prop_map(|(n, a)| Expr::index(&n, a)),
            (
                prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul)],
                inner.clone(),
                inner.clone()
            )
                .prop_map(|(op, l, r)| Expr::binary(op, l, r)),
            inner.clone().prop_map(|e| Expr::new(ExprKind::Neg(Box::new(e)))),
            (prop::collection::vec(binder(inner.clone()), 1..3), inner.clone()).prop_map(|(binders, body)| {
                Expr::new(ExprKind::Sum {
                    binders,
                    body: Box::new(body),
                })
            }),
            (ident(), ident()).prop_map(|(v, r)| Expr::new(ExprKind::Hamming {
                var: Ident::new(v),
                reference: Ident::new(r),
            })),
        ]
    })
    .boxed()
}

pub fn decl() -> impl Strategy<Value = Decl> {
    let e = expr();
    let dims = prop::collection::vec(e.clone(), 1..3);
    let param = (ident(), prop::option::of(dims.clone()))
        .prop_map(|(n, dims)| DeclKind::Param(ParamDecl { name: Ident::new(n), dims }));
    let ty = prop_oneof![
        Just(VarType::Bool),
        (-50i64..50, -50i64..50).prop_map(|(lo, hi)| VarType::Int { lo, hi })
    ];
    let var = (ident(), dims, ty).prop_map(|(n, dims, ty)| {
        DeclKind::Var(VarDecl {
            name: Ident::new(n),
            dims,
            ty,
        })
    });
    let relax = ident().prop_map(|n| DeclKind::Relax(Ident::new(n)));
    let cmp = prop_oneof![Just(Cmp::Le), Just(Cmp::Ge), Just(Cmp::Eq)];
    let constraint = (prop::collection::vec(binder(e.clone()), 0..3), e.clone(), cmp, e)
        .prop_map(|(binders, lhs, cmp, rhs)| DeclKind::Constraint(ConstraintDecl { binders, lhs, cmp, rhs }));
    prop_oneof![param, var, relax, constraint].prop_map(|kind| Decl {
        kind,
        span: Span::default(),
    })
}
