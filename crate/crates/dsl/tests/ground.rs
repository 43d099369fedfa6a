use std::collections::BTreeMap;
use std::path::PathBuf;

use dynsched_core::*;
use dynsched_dsl::ast::{self, Cmp, Domain, Expr, ExprKind};
use dynsched_dsl::{bind, compile, ground, parse, DslError, DslWarning};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Visit<'a> = dyn FnMut(&mut Vec<(String, i64)>) + 'a;

fn data(pairs: &[(&str, Value)]) -> Instance {
    Instance::new(
        ProblemKind::Gsp,
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
    )
}

fn model<S: Scalar>(families: Vec<VariableFamily<S>>, groups: &[&str]) -> ModelIr<S> {
    ModelIr {
        name: "toy".into(),
        description: String::new(),
        params: Vec::new(),
        families,
        groups: groups
            .iter()
            .map(|g| ConstraintGroup {
                name: g.to_string(),
                description: String::new(),
                constraints: Vec::new(),
            })
            .collect(),
        objective: Objective {
            sense: Sense::Minimize,
            expr: LinearExpr::default(),
        },
    }
}

fn desk(kind: ProblemKind, file: &str) -> Instance {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/instances").join(file);
    Instance::from_data_json(kind, &std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn forall_expands_per_index() {
    let m: Model = model(vec![VariableFamily::boolean("v", vec![3], "")], &[]);
    let g = compile("constraint forall s in 0..3: v[s] == 0", &m, &data(&[])).unwrap();
    assert_eq!(g.patch.groups.len(), 1);
    let rows = &g.patch.groups[0].constraints;
    let want: Vec<Constraint> = (0..3)
        .map(|s| LinearConstraint::new([(1, VarId(s))], Relation::Eq, 0))
        .collect();
    assert_eq!(rows, &want);
    assert_eq!(g.patch.groups[0].name, "Dynamic1");
    assert!(g.warnings.is_empty());
}

/// Value of the grounded left-hand side of `expr == 0` under `x`.
fn grounded_value(row: &Constraint, x: &[i64]) -> i64 {
    row.activity(x) - row.rhs
}

#[test]
fn hamming_over_four_cells() {
    let m: Model = model(vec![VariableFamily::boolean("x", vec![4], "")], &[]);
    let inst = data(&[("c", Value::from_flat(&[4], &[1, 0, 1, 0]))]);
    let g = compile("constraint hamming(x, c) == 0", &m, &inst).unwrap();
    let row = &g.patch.groups[0].constraints[0];
    let c = [1, 0, 1, 0];
    for bits in 0..16u32 {
        let x: Vec<i64> = (0..4).map(|i| ((bits >> i) & 1) as i64).collect();
        let expected: i64 = (0..4).map(|i| (x[i] - c[i]).abs()).sum();
        assert_eq!(grounded_value(row, &x), expected, "x = {x:?}");
    }
    // (1 - x0) + x1 + (1 - x2) + x3 written as terms plus a constant of 2.
    let want = LinearConstraint::new([(-1, VarId(0)), (1, VarId(1)), (-1, VarId(2)), (1, VarId(3))], Relation::Eq, -2);
    assert_eq!(row, &want);
}

#[test]
fn hamming_matches_the_distance_exhaustively() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for dims in [vec![12], vec![3, 4], vec![2, 2, 3], vec![1], vec![5]] {
        let cells: usize = dims.iter().product();
        let reference: Vec<i64> = (0..cells).map(|_| rng.gen_range(0..2)).collect();
        let m: Model = model(vec![VariableFamily::boolean("x", dims.clone(), "")], &[]);
        let inst = data(&[("ref", Value::from_flat(&dims, &reference))]);
        let g = compile("constraint hamming(x, ref) == 0", &m, &inst).unwrap();
        let row = &g.patch.groups[0].constraints[0];
        let ref_cells = FamilyValues {
            name: "ref".into(),
            dims: dims.clone(),
            values: reference.clone(),
        };
        for bits in 0..(1u32 << cells) {
            let x: Vec<i64> = (0..cells).map(|i| ((bits >> i) & 1) as i64).collect();
            let cur = FamilyValues {
                name: "x".into(),
                dims: dims.clone(),
                values: x.clone(),
            };
            let d = hamming_distance(&cur, &ref_cells).unwrap();
            assert_eq!(grounded_value(row, &x), d as i64);
        }
    }
}

// A direct interpreter over the syntax tree, used as the reference semantics.
struct Interp<'a> {
    inst: &'a Instance,
    layout: BTreeMap<String, (usize, Vec<usize>)>,
    values: &'a [i64],
}

impl Interp<'_> {
    fn data(&self, name: &str, idx: &[i64]) -> i64 {
        let (dims, flat) = self.inst.shaped(name).unwrap();
        let mut off = 0usize;
        for (i, d) in idx.iter().zip(&dims) {
            assert!(*i >= 0 && (*i as usize) < *d);
            off = off * d + *i as usize;
        }
        flat[off]
    }

    fn cell(&self, name: &str, idx: &[i64]) -> Option<i64> {
        let (base, dims) = self.layout.get(name)?;
        let mut off = 0usize;
        for (i, d) in idx.iter().zip(dims) {
            off = off * d + *i as usize;
        }
        Some(self.values[base + off])
    }

    fn range(&self, b: &ast::Binder, env: &mut Vec<(String, i64)>) -> (i64, i64) {
        match &b.domain {
            Domain::Range(lo, hi) => (self.eval(lo, env), self.eval(hi, env)),
            Domain::Extent(n) => (0, self.data(&n.name, &[])),
        }
    }

    fn each(&self, binders: &[ast::Binder], env: &mut Vec<(String, i64)>, f: &mut Visit) {
        let Some((b, rest)) = binders.split_first() else {
            return f(env);
        };
        let (lo, hi) = self.range(b, env);
        for i in lo..hi {
            env.push((b.name.name.clone(), i));
            self.each(rest, env, f);
            env.pop();
        }
    }

    fn eval(&self, e: &Expr, env: &mut Vec<(String, i64)>) -> i64 {
        match &e.kind {
            ExprKind::Int(v) => *v,
            ExprKind::Ref { name, args } => {
                if let Some((_, v)) = env.iter().rev().find(|(n, _)| *n == name.name) {
                    return *v;
                }
                let idx: Vec<i64> = args.iter().flatten().map(|a| self.eval(a, env)).collect();
                self.cell(&name.name, &idx).unwrap_or_else(|| self.data(&name.name, &idx))
            }
            ExprKind::Sum { binders, body } => {
                let mut total = 0;
                self.each(binders, env, &mut |env| total += self.eval(body, env));
                total
            }
            ExprKind::Hamming { var, reference } => {
                let (base, dims) = &self.layout[&var.name];
                let cells: usize = dims.iter().product();
                let (_, r) = self.inst.shaped(&reference.name).unwrap();
                (0..cells).map(|i| (self.values[base + i] - r[i]).abs()).sum()
            }
            ExprKind::Neg(inner) => -self.eval(inner, env),
            ExprKind::Binary { op, lhs, rhs } => {
                let (l, r) = (self.eval(lhs, env), self.eval(rhs, env));
                match op {
                    ast::BinOp::Add => l + r,
                    ast::BinOp::Sub => l - r,
                    ast::BinOp::Mul => l * r,
                }
            }
        }
    }

    fn holds(&self, c: &ast::ConstraintDecl) -> bool {
        let mut ok = true;
        self.each(&c.binders, &mut Vec::new(), &mut |env| {
            let (l, r) = (self.eval(&c.lhs, env), self.eval(&c.rhs, env));
            ok &= match c.cmp {
                Cmp::Le => l <= r,
                Cmp::Ge => l >= r,
                Cmp::Eq => l == r,
            };
        });
        ok
    }
}

const SOUNDNESS_PATCHES: &[&str] = &[
    "constraint forall i in 0..N: sum(h in 0..H : x[i, h]) <= 2",
    "constraint forall i in N, h in i..H: x[i, h] - y[i] >= -1",
    "constraint sum(i in 0..N, h in 0..H : c[h] * x[i, h]) + 2 * y[0] == 3",
    "constraint hamming(x, ref) <= 2",
    "constraint forall h in 1..H: -(x[0, h] - x[0, h - 1]) * 2 <= y[1] + 1",
    "constraint forall i in 0..N: x[i, 0] + (H - 2) * y[i] >= sum(h in 2..1 : x[i, h])",
    "var z[2]: bool\nconstraint forall i in 0..N: z[i] >= x[i, 1]\nconstraint z[0] + z[1] <= 1 - y[0]",
    "constraint forall i in 0..N, j in i + 1..N: sum(h in H : x[i, h] - x[j, h]) == 0",
];

#[test]
fn grounding_agrees_with_the_interpreter() {
    let m: Model = model(
        vec![
            VariableFamily::boolean("x", vec![2, 3], ""),
            VariableFamily::integer("y", vec![2], -1, 2, ""),
        ],
        &[],
    );
    let inst = data(&[
        ("N", Value::Int(2)),
        ("H", Value::Int(3)),
        ("c", Value::from_flat(&[3], &[1, 2, 0])),
        ("ref", Value::from_flat(&[2, 3], &[1, 0, 1, 0, 0, 1])),
    ]);
    for src in SOUNDNESS_PATCHES {
        let patch = parse(src).unwrap();
        let g = ground(&bind(&patch, &m, &inst).unwrap(), &m).unwrap();
        let next = apply_patch(&m, &g.patch).unwrap();

        let mut layout = BTreeMap::new();
        let mut base = 0;
        for f in &next.families {
            layout.insert(f.name.clone(), (base, f.dims.clone()));
            base += f.len();
        }
        let bounds = next.bounds();
        let decls: Vec<_> = patch.constraints().collect();
        assert_eq!(decls.len(), g.patch.groups.len());

        let mut values: Vec<i64> = bounds.iter().map(|b| b.0).collect();
        let mut seen = [0usize; 2];
        loop {
            let interp = Interp {
                inst: &inst,
                layout: layout.clone(),
                values: &values,
            };
            for (decl, group) in decls.iter().zip(&g.patch.groups) {
                let want = interp.holds(decl);
                let got = group.constraints.iter().all(|c| c.holds(&values));
                assert_eq!(got, want, "{src}: {values:?}");
                seen[want as usize] += 1;
            }
            // Odometer over the full domain.
            let mut i = 0;
            loop {
                if i == values.len() {
                    assert!(seen[0] > 0 && seen[1] > 0, "{src}: one-sided {seen:?}");
                    break;
                }
                if values[i] < bounds[i].1 {
                    values[i] += 1;
                    break;
                }
                values[i] = bounds[i].0;
                i += 1;
            }
            if i == values.len() {
                break;
            }
        }
    }
}

#[test]
fn empty_range_warns_and_grounds_nothing() {
    let m: Model = model(vec![VariableFamily::boolean("v", vec![3], "")], &[]);
    let src = "constraint forall s in 2..2: v[s] == 0";
    let g = compile(src, &m, &data(&[])).unwrap();
    assert!(g.patch.groups[0].constraints.is_empty());
    assert_eq!(g.warnings.len(), 1);
    let DslWarning::EmptyRange { span } = g.warnings[0];
    assert_eq!(&src[span.start..span.end], "s in 2..2");
}

#[test]
fn data_scalar_binds_by_name() {
    let m: Model = build_model(&desk(ProblemKind::Nsp, "nsp_desk.json")).unwrap();
    let mut inst = desk(ProblemKind::Nsp, "nsp_desk.json");
    inst.set_scalar("K", 3);
    let src = "param K\nconstraint sum(d in 0..D, s in 0..S : nurseDayShift[K - 1, d, s]) >= 1";
    let bound = bind::<i64>(&parse(src).unwrap(), &m, &inst).unwrap();
    assert_eq!(bound.params["K"], ParamValue::Scalar(3));
    assert_eq!(bound.new_params, ["K"]);
    assert_eq!(bound.params["D"], ParamValue::Scalar(7));
}

fn expect_err(src: &str, m: &Model, inst: &Instance) -> DslError {
    let err = compile(src, m, inst).unwrap_err();
    let span = err.span();
    assert!(span.start <= span.end && span.end <= src.len(), "{err:?} span outside {src:?}");
    err
}

fn nsp() -> (Model, Instance) {
    let inst = desk(ProblemKind::Nsp, "nsp_desk.json");
    (build_model(&inst).unwrap(), inst)
}

#[test]
fn invented_parameter_is_unknown() {
    let (m, inst) = nsp();
    let src = "param MaxConsecutiveAMShifts\nconstraint forall n in 0..N: nurseDaySlot[n, 0, 0] <= MaxConsecutiveAMShifts";
    let err = expect_err(src, &m, &inst);
    assert_eq!(err.kind(), "UnknownParameter");
    assert_eq!(&src[err.span().start..err.span().end], "MaxConsecutiveAMShifts");
    assert!(err.is_data_key_error());
}

#[test]
fn misnamed_family_is_unknown() {
    let (m, inst) = nsp();
    let src = "constraint forall s in 0..S: nurseShift[0, 0, s] == 0";
    let err = expect_err(src, &m, &inst);
    assert!(matches!(&err, DslError::UnknownVariable { name, .. } if name == "nurseShift"));
}

#[test]
fn products_of_variables_are_rejected_at_bind() {
    let (m, inst) = nsp();
    let src = "constraint nurseDayShift[0, 0, 0] * nurseDayShift[0, 1, 0] <= 0";
    let patch = parse(src).unwrap();
    let err = bind::<i64>(&patch, &m, &inst).unwrap_err();
    assert_eq!(err.kind(), "NonlinearTerm");
    assert_eq!(err.span().start, 11);
    assert_eq!(err.span().end, src.find(" <=").unwrap());
}

#[test]
fn error_classes_carry_spans() {
    let (m, inst) = nsp();
    let cases = [
        ("constraint nurseDayShift[0, 0] == 0", "ArityMismatch"),
        ("constraint nurseDayShift[3, 0, 0] == 0", "BoundsViolation"),
        ("relax NoSuchGroup", "UnknownGroup"),
        ("param N\nparam N", "DuplicateName"),
        ("var nurseDayShift[2]: bool", "DuplicateName"),
        ("constraint forall N in 0..2: nurseDayShift[0, 0, 0] <= 1", "DuplicateName"),
        ("param shiftHours[3]", "ShapeMismatch"),
        ("constraint hamming(surplus, restDays) <= 1", "TypeError"),
        ("constraint hamming(nurseDayShift, restDays) <= 1", "ShapeMismatch"),
        ("constraint nurseDayShift[nurseDaySlot[0, 0, 0], 0, 0] == 0", "TypeError"),
        ("var w[2]: int(3, 1)", "TypeError"),
        ("constraint 9223372036854775807 * 2 * nurseDayShift[0, 0, 0] <= 1", "Overflow"),
    ];
    for (src, kind) in cases {
        let err = expect_err(src, &m, &inst);
        assert_eq!(err.kind(), kind, "{src}: {err}");
        assert!(err.render(src).starts_with(kind));
    }
}

#[test]
fn group_names_skip_existing_ones() {
    let m: Model = model(vec![VariableFamily::boolean("v", vec![2], "")], &["Dynamic1", "Dynamic3"]);
    let g = compile("constraint v[0] <= 1\nconstraint v[1] <= 1\nconstraint v[0] + v[1] >= 1", &m, &data(&[])).unwrap();
    let names: Vec<&str> = g.patch.groups.iter().map(|g| g.name.as_str()).collect();
    assert_eq!(names, ["Dynamic2", "Dynamic4", "Dynamic5"]);
    assert_eq!(g.patch.groups[2].description, "constraint v[0] + v[1] >= 1");
}

#[test]
fn narrow_scalars_report_overflow() {
    let m: ModelIr<i32> = model(vec![VariableFamily::boolean("v", vec![1], "")], &[]);
    let err = compile("constraint 3000000000 * v[0] <= 1", &m, &data(&[])).unwrap_err();
    assert_eq!(err.kind(), "Overflow");
    let ok = compile("constraint 3 * v[0] <= 1", &m, &data(&[])).unwrap();
    assert_eq!(ok.patch.groups[0].constraints[0], LinearConstraint::new([(3i32, VarId(0))], Relation::Le, 1));
}

#[test]
fn relax_and_new_family_apply_cleanly() {
    let (m, inst) = nsp();
    let src = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus/11_overtime_var.dsl")).unwrap();
    let g = compile(&format!("relax MaxHours\n{src}"), &m, &inst).unwrap();
    assert_eq!(g.patch.relaxed, ["MaxHours"]);
    assert_eq!(g.patch.families.len(), 1);
    let next = apply_patch(&m, &g.patch).unwrap();
    assert_eq!(next.num_vars(), m.num_vars() + 3);
    assert!(next.group("MaxHours").is_none());
    // The new family's ids follow the model's.
    let over = next.family("overtime").unwrap();
    assert_eq!(over.offset, m.num_vars());
    let last = &next.groups.last().unwrap().constraints[0];
    assert!(last.terms.iter().all(|(_, v)| v.index() >= m.num_vars()));
}

#[test]
fn unavailable_nurse_days_fixture() {
    let mut inst = desk(ProblemKind::StaticNurse, "static_nurse_desk.json");
    inst.set_scalar("K", 1);
    inst.set_scalar("D1", 2);
    inst.set_scalar("D2", 4);
    let m: Model = build_model(&inst).unwrap();
    let src = "param K\nparam D1\nparam D2\nconstraint forall d in D1..D2 + 1, s in 0..S: X[K, d, s] == 0";
    let g = compile(src, &m, &inst).unwrap();
    let rows = &g.patch.groups[0].constraints;
    let mut want = Vec::new();
    for d in 2..=4 {
        for s in 0..3 {
            want.push(LinearConstraint::new([(1, m.var("X", &[1, d, s]).unwrap())], Relation::Eq, 0));
        }
    }
    assert_eq!(rows, &want);

    let next = apply_patch(&m, &g.patch).unwrap();
    let r = dynsched_solver::solve(&next, &dynsched_solver::SolveLimits::default());
    assert_eq!(r.status, dynsched_solver::SolveStatus::Optimal);
    let best = r.best.unwrap();
    for d in 2..=4 {
        for s in 0..3 {
            assert_eq!(best.get(m.var("X", &[1, d, s]).unwrap()), 0);
        }
    }
    assert!(evaluate_assignment(&next, &best).unwrap().feasible);
}

#[test]
fn seed_corpus_outputs_compile() {
    let mut inst = desk(ProblemKind::Gsp, "gsp_desk.json");
    for (k, v) in [("A", 0), ("B", 1), ("H1", 2), ("H2", 5), ("K", 2), ("TK", 1), ("MaxHours", 5), ("T_perturb", 3)] {
        inst.set_scalar(k, v);
    }
    inst.set_array("origSchedule", &[3, 8], &[0; 24]);
    let m: Model = build_model(&inst).unwrap();
    let store = dynsched_rag::seeded_store();
    for ex in store.examples().iter().filter(|e| e.stage == dynsched_rag::Stage::Coding) {
        let g = compile(&ex.output_text, &m, &inst).unwrap_or_else(|e| panic!("{}: {}", ex.id, e.render(&ex.output_text)));
        assert!(apply_patch(&m, &g.patch).is_ok(), "{}", ex.id);
    }
}
