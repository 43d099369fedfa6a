//! The two-step nurse scenario shared by the fixture recorder and the tests.

use std::path::PathBuf;

use dynsched_agents::{Script, ScriptedBackend};
use dynsched_core::{Instance, ProblemKind};

pub const UNAVAILABLE: &str = "Add a constraint such that nurse A is not available from day D1 to D2.";
pub const FEW_CHANGES: &str = "Add a constraint such that the number of changes to the schedule should not exceed T.";

pub const NURSE: i64 = 1;
pub const FIRST_DAY: i64 = 2;
pub const LAST_DAY: i64 = 4;

pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/fixtures/motivating.json")
}

pub fn base_instance() -> Instance {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/instances/static_nurse_desk.json");
    Instance::from_data_json(ProblemKind::StaticNurse, &std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Base data plus the keys named by the first request.
pub fn step_one_instance() -> Instance {
    let mut inst = base_instance();
    inst.set_scalar("A", NURSE);
    inst.set_scalar("D1", FIRST_DAY);
    inst.set_scalar("D2", LAST_DAY);
    inst
}

/// Step one data plus the published schedule and the change budget.
pub fn step_two_instance(orig: &[i64], dims: &[usize], t: i64) -> Instance {
    let mut inst = step_one_instance();
    inst.set_array("origSchedule", dims, orig);
    inst.set_scalar("T_perturb", t);
    inst
}

pub fn scripted() -> ScriptedBackend {
    ScriptedBackend::new("motivating")
        .script(
            UNAVAILABLE,
            Script {
                planning: vec!["New Parameters:\n\
                     A: the nurse who is unavailable\n\
                     D1: first day of the absence\n\
                     D2: last day of the absence, inclusive\n\n\
                     New Variables:\nNone\n\n\
                     New Constraints:\nX[A,d,s] = 0 for every day d from D1 to D2 and every shift s"
                    .into()],
                // The first draft closes the range one day early and uses a
                // bare `=`; the repair fixes the comparison.
                coding: vec![
                    "param A\nparam D1\nparam D2\nconstraint forall d in D1..D2 + 1, s in 0..S: X[A, d, s] = 0\n".into(),
                    "param A\nparam D1\nparam D2\nconstraint forall d in D1..D2 + 1, s in 0..S: X[A, d, s] == 0\n".into(),
                ],
                paraphrase: Vec::new(),
            },
        )
        .script(
            FEW_CHANGES,
            Script {
                planning: vec!["New Parameters:\n\
                     origSchedule[n,d,s]: the schedule published before the change\n\
                     T_perturb: the largest number of cells allowed to change (T in the request)\n\n\
                     New Variables:\nNone\n\n\
                     New Constraints:\nsum(|X[n,d,s] - origSchedule[n,d,s]| for each n, d, s) <= T_perturb"
                    .into()],
                coding: vec![
                    "```\nparam origSchedule[N, D, S]\nparam T_perturb\nconstraint hamming(X, origSchedule) <= T_perturb\n```"
                        .into(),
                ],
                paraphrase: Vec::new(),
            },
        )
}
