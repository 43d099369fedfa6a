//! Small random models for checks against exhaustive search.

use dynsched_core::{
    ConstraintGroup, LinearConstraint, LinearExpr, Model, ModelIr, Objective, Relation, Sense, VarId, VariableFamily,
};
use proptest::prelude::*;

pub fn bare(families: Vec<VariableFamily<i64>>, rows: Vec<LinearConstraint<i64>>, sense: Sense, obj: Vec<(i64, usize)>) -> Model {
    ModelIr {
        name: "t".into(),
        description: String::new(),
        params: vec![],
        families,
        groups: vec![ConstraintGroup {
            name: "G".into(),
            description: String::new(),
            constraints: rows,
        }],
        objective: Objective {
            sense,
            expr: LinearExpr::new(obj.into_iter().map(|(c, v)| (c, VarId(v))), 0),
        },
    }
}

/// Random small model: up to 14 booleans, up to 2 integers in [-3, 4],
/// up to 6 rows with mixed relations, either sense.
pub fn arb_model() -> impl Strategy<Value = Model> {
    (0usize..=14, 0usize..=2, 0usize..=6, any::<bool>()).prop_flat_map(|(nb, ni, nr, maximize)| {
        let n = nb + ni;
        let ints = proptest::collection::vec((-3i64..=0, 0i64..=4), ni);
        let term = (-4i64..=4, 0..n.max(1));
        let row = (
            proptest::collection::vec(term.clone(), 0..=n.min(6)),
            prop_oneof![Just(Relation::Le), Just(Relation::Ge), Just(Relation::Eq)],
            -4i64..=6,
        );
        let rows = proptest::collection::vec(row, nr);
        let obj = proptest::collection::vec(term, 0..=n);
        (Just(nb), ints, rows, obj, Just(maximize))
    })
    .prop_map(|(nb, ints, rows, obj, maximize)| {
        let n = nb + ints.len();
        let mut families = Vec::new();
        if nb > 0 {
            families.push(VariableFamily::boolean("b", vec![nb], ""));
        }
        for (i, (lo, hi)) in ints.into_iter().enumerate() {
            families.push(VariableFamily::integer(format!("z{i}"), vec![1], lo, hi, ""));
        }
        let keep = |ts: Vec<(i64, usize)>| -> Vec<(i64, usize)> { ts.into_iter().filter(|t| t.1 < n).collect() };
        let rows = rows
            .into_iter()
            .map(|(ts, rel, rhs)| LinearConstraint::new(keep(ts).into_iter().map(|(c, v)| (c, VarId(v))), rel, rhs))
            .collect();
        let sense = if maximize { Sense::Maximize } else { Sense::Minimize };
        bare(families, rows, sense, keep(obj))
    })
}

