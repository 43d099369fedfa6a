mod common;

use common::*;
use dynsched_core::{
    build_model, evaluate_assignment, Assignment, Instance, Model, ModelError, ProblemKind,
    Schedule, Sense, VarId, Violation,
};
use rand::SeedableRng;

fn nsp_2x7x4() -> Instance {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    nsp(&mut rng, 2, 7, 4)
}

#[test]
fn nsp_family_and_group_sizes() {
    let inst = nsp_2x7x4();
    let model: Model = build_model(&inst).unwrap();
    let (n, d, s, t) = (2, 7, 4, 3);

    let fam = |name: &str| model.family(name).unwrap().family.len();
    assert_eq!(fam("nurseDayShift"), n * d * s);
    assert_eq!(fam("nurseDaySlot"), n * d * t);
    assert_eq!(fam("surplus"), d * t);
    assert_eq!(fam("shortfall"), d * t);
    assert_eq!(model.family("surplus").unwrap().family.bounds(), (0, n as i64));

    // One row per quantifier tuple of each appendix constraint.
    let expected = [
        ("Availability", n * d * s),
        ("MaxOneShiftPerDay", n * d),
        ("ShiftSlotLink", n * d * t),
        ("Demand", d * t),
        ("MinHours", n),
        ("MaxHours", n),
        ("RestDays", n * d * s),
        ("MaxWorkingDays", n * (d / 7)),
        ("NoNDAM", n * (d - 1)),
    ];
    let got: Vec<(&str, usize)> = model.groups.iter().map(|g| (g.name.as_str(), g.len())).collect();
    assert_eq!(got, expected);
    assert_eq!(expected.map(|e| e.1), [56, 14, 42, 21, 2, 2, 56, 2, 12]);
    assert_eq!(model.objective.sense, Sense::Minimize);
}

fn gsp_tiny(t: usize) -> Instance {
    let pairs = vec![
        ("W", int(1)),
        ("H", int(3)),
        ("T", int(t as i64)),
        ("BMin", int(1)),
        ("BMax", int(3)),
        ("RMin", int(1)),
        ("availableHours", filled(&[1, 3], 1)),
        ("workerTaskSkills", filled(&[1, t], 1)),
        ("taskHour", filled(&[t], 0)),
    ];
    Instance::new(ProblemKind::Gsp, data(pairs))
}

#[test]
fn gsp_without_tasks_has_nine_booleans() {
    let model: Model = build_model(&gsp_tiny(0)).unwrap();
    assert_eq!(model.num_vars(), 9);
    let names: Vec<&str> = model.families.iter().map(|f| f.name.as_str()).collect();
    assert_eq!(names, ["workerHours", "startBlock", "endBlock"]);
    assert!(model.families.iter().all(|f| f.is_boolean()));
    let report = evaluate_assignment(&model, &Schedule::zeros(9)).unwrap();
    assert!(report.feasible);
    assert_eq!(report.objective, 0);
}

#[test]
fn gsp_unassigned_task_penalty() {
    let model: Model = build_model(&gsp_tiny(1)).unwrap();
    let u = model.var("unassignedTask", &[0]).unwrap();

    let mut a = Schedule::zeros(model.num_vars());
    a.set(u, 1);
    let report = evaluate_assignment(&model, &a).unwrap();
    assert!(report.feasible);
    assert_eq!(report.objective, 1000);

    a.set(u, 0);
    let report = evaluate_assignment(&model, &a).unwrap();
    assert!(!report.feasible);
    assert_eq!(
        report.violated,
        vec![Violation {
            group: "UnassignedTask".into(),
            index: 0
        }]
    );
}

#[test]
fn static_nurse_single_cell() {
    let model: Model = build_model(&static_nurse(1, 1, 1, 1, &[1])).unwrap();
    assert_eq!(model.num_vars(), 1);
    assert_eq!(model.objective.sense, Sense::Maximize);
    let zero = evaluate_assignment(&model, &Schedule::zeros(1)).unwrap();
    assert!(!zero.feasible);
    let one = evaluate_assignment(&model, &Schedule::new(vec![1])).unwrap();
    assert!(one.feasible);
    assert_eq!(one.objective, 1);
}

#[test]
fn empty_constraint_list_accepts_everything() {
    let mut model: Model = build_model(&static_nurse(2, 2, 2, 0, &[1; 8])).unwrap();
    model.groups.clear();
    for bits in 0..256u32 {
        let a = Assignment::new((0..8).map(|i| i64::from(bits >> i & 1)).collect());
        assert!(evaluate_assignment(&model, &a).unwrap().feasible);
    }
}

#[test]
fn partial_or_out_of_bounds_assignments_are_rejected() {
    let model: Model = build_model(&static_nurse(1, 1, 2, 0, &[1, 0])).unwrap();
    assert!(matches!(
        evaluate_assignment(&model, &Schedule::zeros(1)),
        Err(ModelError::PartialAssignment { expected: 2, got: 1 })
    ));
    assert!(matches!(
        evaluate_assignment(&model, &Schedule::new(vec![0, 2])),
        Err(ModelError::OutOfBounds { .. })
    ));
}

#[test]
fn schema_errors_name_the_key() {
    let mut inst = static_nurse(1, 1, 1, 1, &[1]);
    inst.data.remove("M");
    let err = build_model::<i64>(&inst).unwrap_err();
    assert!(matches!(err, ModelError::Schema { ref key, .. } if key == "M"), "{err}");

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let mut inst = gsp(&mut rng, 2, 4, 1);
    inst.set_array("availableHours", &[2, 4], &[1, 0, 2, 1, 1, 1, 1, 1]);
    let err = build_model::<i64>(&inst).unwrap_err();
    assert!(matches!(err, ModelError::Schema { ref key, .. } if key == "availableHours"), "{err}");

    let mut inst = gsp(&mut rng, 2, 4, 1);
    inst.set_array("availableHours", &[2, 3], &[1; 6]);
    let err = build_model::<i64>(&inst).unwrap_err();
    assert!(matches!(err, ModelError::Schema { ref key, .. } if key == "availableHours"), "{err}");
}

#[test]
fn generic_scalar_builds_the_same_model() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let inst = gsp(&mut rng, 2, 6, 2);
    let wide: dynsched_core::ModelIr<i128> = build_model(&inst).unwrap();
    let narrow: dynsched_core::ModelIr<i32> = build_model(&inst).unwrap();
    assert_eq!(wide.num_vars(), narrow.num_vars());
    for (a, b) in wide.groups.iter().zip(&narrow.groups) {
        assert_eq!(a.name, b.name);
        assert_eq!(a.constraints.len(), b.constraints.len());
        for (ca, cb) in a.constraints.iter().zip(&b.constraints) {
            assert_eq!(ca.relation, cb.relation);
            assert_eq!(ca.rhs as i64, cb.rhs as i64);
            let ta: Vec<(i64, VarId)> = ca.terms.iter().map(|&(c, v)| (c as i64, v)).collect();
            let tb: Vec<(i64, VarId)> = cb.terms.iter().map(|&(c, v)| (c as i64, v)).collect();
            assert_eq!(ta, tb);
        }
    }
}
