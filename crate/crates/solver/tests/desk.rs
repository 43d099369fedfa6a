//! Desk-scale instances must solve to proven optimality well inside the
//! default budget.

use std::path::PathBuf;

use dynsched_core::{build_model, evaluate_assignment, Instance, Model, ProblemKind};
use dynsched_solver::{solve, SolveLimits, SolveStatus};

fn load(kind: ProblemKind, file: &str) -> Instance {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/instances").join(file);
    Instance::from_data_json(kind, &std::fs::read_to_string(path).unwrap()).unwrap()
}

fn check(kind: ProblemKind, file: &str) -> i64 {
    let model: Model = build_model(&load(kind, file)).unwrap();
    let r = solve(&model, &SolveLimits::default());
    eprintln!("{file}: {:?} obj={:?} nodes={} t={:.3}s", r.status, r.objective, r.nodes, r.wall_time);
    assert_eq!(r.status, SolveStatus::Optimal);
    let eval = evaluate_assignment(&model, r.best.as_ref().unwrap()).unwrap();
    assert!(eval.feasible);
    assert_eq!(Some(eval.objective), r.objective);
    eval.objective
}

#[test]
fn gsp_desk() {
    check(ProblemKind::Gsp, "gsp_desk.json");
}

#[test]
fn nsp_desk() {
    check(ProblemKind::Nsp, "nsp_desk.json");
}

#[test]
fn static_nurse_desk() {
    check(ProblemKind::StaticNurse, "static_nurse_desk.json");
}
