//! Writes the evaluation test set and the replay fixtures under data/.
//!
//! Fourteen requests (seven per problem kind), each with four rewordings,
//! give seventy cases. Two scripted answer sets stand in for two language
//! models of different strength; every exchange is recorded so the test
//! suite can replay it exactly.
//!
//! cargo run -p dynsched-eval --example generate_fixtures

use std::collections::BTreeMap;
use std::path::PathBuf;

use dynsched_agents::{paraphrase, RecordingBackend, Script, ScriptedBackend};
use dynsched_core::{build_model, Instance, Model, ProblemKind};
use dynsched_eval::{run_testset, EvalOptions, Outcome, TestCase, TestSet};
use dynsched_solver::{solve, SolveLimits};

struct Group {
    id: &'static str,
    kind: ProblemKind,
    keys: &'static [(&'static str, i64)],
    /// Adds the base optimum as `origSchedule`.
    orig: bool,
    variants: [&'static str; 5],
    plan: &'static str,
    target: &'static str,
}

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn groups() -> Vec<Group> {
    use ProblemKind::{Gsp, Nsp};
    vec![
        Group {
            id: "gsp-unavailable",
            kind: Gsp,
            keys: &[("A", 1), ("H1", 1), ("H2", 2)],
            orig: false,
            variants: [
                "Worker A is not available from hour H1 to hour H2.",
                "Worker A cannot be scheduled between hour H1 and hour H2.",
                "Do not assign worker A to any hour from H1 up to H2.",
                "Worker A is unavailable during hours H1 through H2.",
                "Keep worker A off the schedule from hour H1 until hour H2.",
            ],
            plan: "New Parameters:\nA: the unavailable worker\nH1: first blocked hour\nH2: last blocked hour\n\n\
                   New Variables:\nNone\n\nNew Constraints:\nworkerHours[A,h] = 0 for h = H1, ..., H2",
            target: "param A\nparam H1\nparam H2\nconstraint forall h in H1..H2 + 1: workerHours[A,h] == 0\n",
        },
        Group {
            id: "gsp-min-hours",
            kind: Gsp,
            keys: &[("A", 2), ("K", 5)],
            orig: false,
            variants: [
                "Worker A must work at least K hours in total.",
                "Make sure worker A is given no fewer than K hours.",
                "Worker A needs a minimum of K working hours.",
                "At least K hours of work have to go to worker A.",
                "Assign worker A K or more hours over the day.",
            ],
            plan: "New Parameters:\nA: the worker concerned\nK: minimum total hours of worker A\n\n\
                   New Variables:\nNone\n\nNew Constraints:\nsum over h of workerHours[A,h] >= K",
            target: "param A\nparam K\nconstraint sum(h in 0..H: workerHours[A,h]) >= K\n",
        },
        Group {
            id: "gsp-pin-task",
            kind: Gsp,
            keys: &[("A", 0), ("TK", 3)],
            orig: false,
            variants: [
                "Task TK must be assigned to worker A.",
                "Worker A has to take care of task TK.",
                "Give task TK to worker A.",
                "Task TK is to be performed by worker A.",
                "Worker A is the one who must do task TK.",
            ],
            plan: "New Parameters:\nA: the worker\nTK: the task pinned to worker A\n\n\
                   New Variables:\nNone\n\nNew Constraints:\ntaskAssigned[A,TK] = 1",
            target: "param A\nparam TK\nconstraint taskAssigned[A,TK] == 1\n",
        },
        Group {
            id: "gsp-apart",
            kind: Gsp,
            keys: &[("A", 0), ("B", 1)],
            orig: false,
            variants: [
                "Workers A and B must not work during the same hour.",
                "Worker A and worker B can never be on duty at the same time.",
                "No hour may have both worker A and worker B assigned.",
                "Avoid scheduling workers A and B in the same hour.",
                "At any hour, at most one of workers A and B may be working.",
            ],
            plan: "New Parameters:\nA: first worker\nB: second worker\n\n\
                   New Variables:\nNone\n\nNew Constraints:\nworkerHours[A,h] + workerHours[B,h] <= 1 for every hour h",
            target: "param A\nparam B\nconstraint forall h in 0..H: workerHours[A,h] + workerHours[B,h] <= 1\n",
        },
        Group {
            id: "gsp-max-hours",
            kind: Gsp,
            keys: &[("MaxHours", 3)],
            orig: false,
            variants: [
                "No worker may be assigned more than MaxHours hours.",
                "Each worker works at most MaxHours hours.",
                "Limit every worker to MaxHours hours or fewer.",
                "The total hours of any worker must not exceed MaxHours.",
                "Cap the working time of each worker at MaxHours hours.",
            ],
            plan: "New Parameters:\nMaxHours: largest number of hours per worker\n\n\
                   New Variables:\nNone\n\nNew Constraints:\nsum over h of workerHours[w,h] <= MaxHours for every worker w",
            target: "param MaxHours\nconstraint forall w in 0..W: sum(h in 0..H: workerHours[w,h]) <= MaxHours\n",
        },
        Group {
            id: "gsp-one-block",
            kind: Gsp,
            keys: &[("A", 1)],
            orig: false,
            variants: [
                "Worker A may work at most one block of consecutive hours.",
                "Worker A should have no more than one shift block during the day.",
                "Worker A's hours must form a single continuous block, if any.",
                "Do not split the hours of worker A into several blocks.",
                "Worker A can start at most one block of work.",
            ],
            plan: "New Parameters:\nA: the worker concerned\n\n\
                   New Variables:\nNone\n\nNew Constraints:\nsum over h of startBlock[A,h] <= 1",
            target: "param A\nconstraint sum(h in 0..H: startBlock[A,h]) <= 1\n",
        },
        Group {
            id: "gsp-repair",
            kind: Gsp,
            keys: &[("A", 2), ("HA", 5), ("T_perturb", 4)],
            orig: true,
            variants: [
                "Worker A is not available at hour HA, and the new schedule may differ from origSchedule in at most T_perturb worker-hours.",
                "Worker A cannot work at hour HA; change at most T_perturb worker-hour cells relative to origSchedule.",
                "Remove worker A from hour HA while keeping the number of changed worker-hours compared with origSchedule at or below T_perturb.",
                "Worker A is unavailable in hour HA. The repaired schedule must stay within T_perturb changes of origSchedule.",
                "Take hour HA away from worker A, but change no more than T_perturb entries of origSchedule.",
            ],
            plan: "New Parameters:\nA: the worker who becomes unavailable\nHA: the hour in question\n\
                   origSchedule[w,h]: the published worker-hour grid\nT_perturb: largest number of changed cells\n\n\
                   New Variables:\nNone\n\nNew Constraints:\nworkerHours[A,HA] = 0\n\
                   sum over w, h of |workerHours[w,h] - origSchedule[w,h]| <= T_perturb",
            target: "param A\nparam HA\nparam origSchedule[W, H]\nparam T_perturb\n\
                     constraint workerHours[A,HA] == 0\n\
                     constraint hamming(workerHours, origSchedule) <= T_perturb\n",
        },
        Group {
            id: "nsp-day-off",
            kind: Nsp,
            keys: &[("A", 0), ("DAY", 0)],
            orig: false,
            variants: [
                "Nurse A cannot work on day DAY.",
                "Nurse A is unavailable on day DAY.",
                "Do not give nurse A any shift on day DAY.",
                "Nurse A must be off duty on day DAY.",
                "Day DAY is a day off for nurse A.",
            ],
            plan: "New Parameters:\nA: the nurse\nDAY: the day nurse A is off\n\n\
                   New Variables:\nNone\n\nNew Constraints:\nnurseDayShift[A,DAY,s] = 0 for every shift s",
            target: "param A\nparam DAY\nconstraint forall s in 0..S: nurseDayShift[A,DAY,s] == 0\n",
        },
        Group {
            id: "nsp-nights",
            kind: Nsp,
            keys: &[("A", 1), ("K", 1)],
            orig: false,
            variants: [
                "Nurse A should work at most K night shifts.",
                "Nurse A may be given no more than K night shifts.",
                "Limit the night shifts of nurse A to K.",
                "The number of nights worked by nurse A must not exceed K.",
                "Nurse A works K night shifts or fewer.",
            ],
            plan: "New Parameters:\nA: the nurse\nK: largest number of night shifts for nurse A\n\n\
                   New Variables:\nNone\n\nNew Constraints:\nsum over d of nurseDaySlot[A,d,2] <= K",
            target: "param A\nparam K\nconstraint sum(d in 0..D: nurseDaySlot[A,d,2]) <= K\n",
        },
        Group {
            id: "nsp-apart",
            kind: Nsp,
            keys: &[("A", 0), ("B", 1)],
            orig: false,
            variants: [
                "Nurses A and B must not work on the same day.",
                "Nurse A and nurse B should never be scheduled on the same day.",
                "On any day, at most one of nurses A and B may work.",
                "Avoid days on which both nurse A and nurse B are working.",
                "Nurses A and B cannot share a working day.",
            ],
            plan: "New Parameters:\nA: first nurse\nB: second nurse\n\n\
                   New Variables:\nNone\n\nNew Constraints:\n\
                   sum over s of nurseDayShift[A,d,s] + nurseDayShift[B,d,s] <= 1 for every day d",
            target: "param A\nparam B\n\
                     constraint forall d in 0..D: sum(s in 0..S: nurseDayShift[A,d,s] + nurseDayShift[B,d,s]) <= 1\n",
        },
        Group {
            id: "nsp-coverage",
            kind: Nsp,
            keys: &[("MinNurses", 1)],
            orig: false,
            variants: [
                "At least MinNurses nurses must work on every day.",
                "Each day needs a minimum of MinNurses nurses on duty.",
                "Make sure no day has fewer than MinNurses working nurses.",
                "Every day, MinNurses or more nurses have to be scheduled.",
                "The number of nurses on duty per day must be at least MinNurses.",
            ],
            plan: "New Parameters:\nMinNurses: fewest nurses working on a day\n\n\
                   New Variables:\nNone\n\nNew Constraints:\n\
                   sum over n, s of nurseDayShift[n,d,s] >= MinNurses for every day d",
            target: "param MinNurses\n\
                     constraint forall d in 0..D: sum(n in 0..N, s in 0..S: nurseDayShift[n,d,s]) >= MinNurses\n",
        },
        Group {
            id: "nsp-mornings",
            kind: Nsp,
            keys: &[],
            orig: false,
            variants: [
                "No nurse may work a morning shift on three consecutive days.",
                "A nurse should not work more than two morning shifts in a row.",
                "Nurses must not be given morning shifts on three days running.",
                "Avoid any nurse working mornings three days in a row.",
                "Each nurse can have at most two consecutive days of morning shifts.",
            ],
            plan: "New Parameters:\nNone\n\nNew Variables:\nNone\n\nNew Constraints:\n\
                   nurseDaySlot[n,d,0] + nurseDaySlot[n,d+1,0] + nurseDaySlot[n,d+2,0] <= 2 for every nurse n and day d",
            target: "constraint forall n in 0..N, d in 0..D - 2: \
                     nurseDaySlot[n,d,0] + nurseDaySlot[n,d + 1,0] + nurseDaySlot[n,d + 2,0] <= 2\n",
        },
        Group {
            id: "nsp-weekend",
            kind: Nsp,
            keys: &[],
            orig: false,
            variants: [
                "Every nurse gets at least one weekend day (day 5 or day 6) off.",
                "Each nurse must be free on day 5 or day 6, or both.",
                "No nurse works both weekend days 5 and 6.",
                "Nurses may work at most one of the two weekend days, day 5 and day 6.",
                "Give every nurse at least one free day among days 5 and 6.",
            ],
            plan: "New Parameters:\nNone\n\nNew Variables:\nNone\n\nNew Constraints:\n\
                   sum over s of nurseDayShift[n,5,s] + nurseDayShift[n,6,s] <= 1 for every nurse n",
            target: "constraint forall n in 0..N: sum(s in 0..S: nurseDayShift[n,5,s] + nurseDayShift[n,6,s]) <= 1\n",
        },
        Group {
            id: "nsp-repair",
            kind: Nsp,
            keys: &[("A", 0), ("DAY", 2), ("T_perturb", 2)],
            orig: true,
            variants: [
                "Nurse A cannot work on day DAY, and the roster may differ from origSchedule in at most T_perturb cells.",
                "Nurse A is unavailable on day DAY; change at most T_perturb assignments compared with origSchedule.",
                "Take nurse A off day DAY while keeping the number of changes to origSchedule within T_perturb.",
                "Nurse A must not work on day DAY. The new roster may change no more than T_perturb entries of origSchedule.",
                "Remove nurse A from day DAY and change at most T_perturb cells of origSchedule.",
            ],
            plan: "New Parameters:\nA: the nurse\nDAY: the day nurse A is off\n\
                   origSchedule[n,d,s]: the published roster\nT_perturb: largest number of changed cells\n\n\
                   New Variables:\nNone\n\nNew Constraints:\nnurseDayShift[A,DAY,s] = 0 for every shift s\n\
                   sum over n, d, s of |nurseDayShift[n,d,s] - origSchedule[n,d,s]| <= T_perturb",
            target: "param A\nparam DAY\nparam origSchedule[N, D, S]\nparam T_perturb\n\
                     constraint forall s in 0..S: nurseDayShift[A,DAY,s] == 0\n\
                     constraint hamming(nurseDayShift, origSchedule) <= T_perturb\n",
        },
    ]
}

/// How one scripted model answers one case.
struct Answer {
    plan: Option<String>,
    coding: Vec<String>,
    expect: Outcome,
}

fn ok() -> Answer {
    Answer {
        plan: None,
        coding: Vec::new(),
        expect: Outcome::Match,
    }
}

fn answer(expect: Outcome, coding: &[&str]) -> Answer {
    Answer {
        plan: None,
        coding: coding.iter().map(|s| s.to_string()).collect(),
        expect,
    }
}

fn with_plan(mut a: Answer, plan: &str) -> Answer {
    a.plan = Some(plan.to_string());
    a
}

const G1_OPEN: &str = "param A\nparam H1\nparam H2\nconstraint forall h in H1..H2: workerHours[A,h] == 0\n";
const G2_ALL: &str = "param K\nconstraint sum(w in 0..W, h in 0..H: workerHours[w,h]) >= K\n";
const G7_LT: &str = "param A\nparam HA\nparam origSchedule[W, H]\nparam T_perturb\n\
                     constraint workerHours[A,HA] == 0\n\
                     constraint hamming(workerHours, origSchedule) < T_perturb\n";
const G7_ABS: &str = "param A\nparam HA\nparam origSchedule[W, H]\nparam T_perturb\n\
                      constraint workerHours[A,HA] == 0\n\
                      constraint sum(w in 0..W, h in 0..H: abs(workerHours[w,h] - origSchedule[w,h])) <= T_perturb\n";
const G7_NEQ: &str = "param A\nparam HA\nparam origSchedule[W, H]\nparam T_perturb\n\
                      constraint workerHours[A,HA] == 0\n\
                      constraint sum(w in 0..W, h in 0..H: workerHours[w,h] != origSchedule[w,h]) <= T_perturb\n";
const N5_LT: &str = "constraint forall n in 0..N, d in 0..D - 2: \
                     nurseDaySlot[n,d,0] + nurseDaySlot[n,d + 1,0] + nurseDaySlot[n,d + 2,0] < 3\n";
const N5_HALLUCINATED: &str = "param MaxConsecutiveAMShifts\n\
                               constraint forall n in 0..N, d in 0..D - 2: \
                               nurseDaySlot[n,d,0] + nurseDaySlot[n,d + 1,0] + nurseDaySlot[n,d + 2,0] <= MaxConsecutiveAMShifts\n";
const N5_HALLUCINATED_BARE: &str = "constraint forall n in 0..N, d in 0..D - 2: \
                                    nurseDaySlot[n,d,0] + nurseDaySlot[n,d + 1,0] + nurseDaySlot[n,d + 2,0] <= MaxConsecutiveAMShifts\n";
const N7_ABS: &str = "param A\nparam DAY\nparam origSchedule[N, D, S]\nparam T_perturb\n\
                      constraint forall s in 0..S: nurseDayShift[A,DAY,s] == 0\n\
                      constraint sum(n in 0..N, d in 0..D, s in 0..S: abs(nurseDayShift[n,d,s] - origSchedule[n,d,s])) <= T_perturb\n";

/// The stronger scripted model: mostly right, a few range and scope slips.
fn strong(group: &str, v: usize) -> Answer {
    use Outcome::*;
    match (group, v) {
        ("gsp-unavailable", 2..=4) => answer(FeasibleNotMatch, &[G1_OPEN]),
        ("gsp-min-hours", 1 | 3 | 4) => answer(FeasibleNotMatch, &[G2_ALL]),
        ("gsp-apart", 3) => answer(
            Match,
            &["param A\nparam B\nconstraint forall h in H: workerHours[A,h] + workerHours[B,h] <= 1\n"],
        ),
        ("gsp-max-hours", 4) => answer(
            Match,
            &["constraint forall w in W: sum(h in H: workerHours[w,h]) <= MaxHours\n"],
        ),
        ("gsp-repair", 0 | 1) => answer(Match, &[G7_LT, ""]),
        ("nsp-day-off", 2) => answer(
            Match,
            &["param A\nparam DAY\nconstraint sum(s in 0..S: nurseDayShift[A,DAY,s]) == 0\n"],
        ),
        ("nsp-mornings", 3) => answer(SyntaxError, &[N5_LT, N5_LT, N5_LT]),
        ("nsp-repair", 2) => answer(
            Match,
            &[
                "param A\nparam DAY\nparam origSchedule[N, D, S]\nparam T_perturb\n\
                 constraint forall s in 0..S: nurseShift[A,DAY,s] == 0\n\
                 constraint hamming(nurseDayShift, origSchedule) <= T_perturb\n",
                "",
            ],
        ),
        _ => ok(),
    }
}

/// The weaker scripted model: invents data keys, writes unsupported
/// syntax and over-constrains.
fn weak(group: &str, v: usize) -> Answer {
    use Outcome::*;
    let hallucinated_hours = "param maxHoursPerWorker\n\
         constraint forall w in 0..W: sum(h in 0..H: workerHours[w,h]) <= maxHoursPerWorker\n";
    let hallucinated_min = "param A\nparam minWorkerHours\n\
         constraint sum(h in 0..H: workerHours[A,h]) >= minWorkerHours\n";
    let hallucinated_nights = "param A\nparam MaxNightShifts\n\
         constraint sum(d in 0..D: nurseDaySlot[A,d,2]) <= MaxNightShifts\n";
    match (group, v) {
        ("gsp-unavailable", 1..=4) => answer(FeasibleNotMatch, &[G1_OPEN]),
        ("gsp-min-hours", 1) => answer(FeasibleNotMatch, &[G2_ALL]),
        ("gsp-min-hours", 2) => answer(
            Infeasible,
            &["param A\nparam K\nconstraint forall h in 0..H: workerHours[A,h] >= 1\n"],
        ),
        ("gsp-min-hours", 3 | 4) => with_plan(
            answer(DataKeyError, &[hallucinated_min, hallucinated_min, hallucinated_min]),
            "New Parameters:\nA: the worker\nminWorkerHours: least hours for worker A\n\n\
             New Variables:\nNone\n\nNew Constraints:\nsum over h of workerHours[A,h] >= minWorkerHours",
        ),
        ("gsp-pin-task", 1) => answer(
            Match,
            &["param A\nparam TK\nconstraint taskAssigned[A][TK] == 1\n", ""],
        ),
        ("gsp-max-hours", 0..=2) => with_plan(
            answer(DataKeyError, &[hallucinated_hours, hallucinated_hours, hallucinated_hours]),
            "New Parameters:\nmaxHoursPerWorker: hour limit of a worker\n\n\
             New Variables:\nNone\n\nNew Constraints:\nsum over h of workerHours[w,h] <= maxHoursPerWorker",
        ),
        ("gsp-repair", 0..=2) => answer(SyntaxError, &[G7_ABS, G7_NEQ, G7_ABS]),
        ("nsp-nights", 1 | 2) => with_plan(
            answer(DataKeyError, &[hallucinated_nights, hallucinated_nights, hallucinated_nights]),
            "New Parameters:\nA: the nurse\nMaxNightShifts: night shift limit\n\n\
             New Variables:\nNone\n\nNew Constraints:\nsum over d of nurseDaySlot[A,d,2] <= MaxNightShifts",
        ),
        ("nsp-apart", 0..=2) => answer(
            Infeasible,
            &["param A\nparam B\n\
               constraint forall d in 0..D: sum(s in 0..S: nurseDayShift[A,d,s] + nurseDayShift[B,d,s]) == 1\n"],
        ),
        ("nsp-coverage", 3 | 4) => answer(
            Infeasible,
            &["constraint forall d in 0..D: sum(n in 0..N, s in 0..S: nurseDayShift[n,d,s]) == N\n"],
        ),
        ("nsp-mornings", _) => with_plan(
            answer(DataKeyError, &[N5_HALLUCINATED, N5_HALLUCINATED_BARE, N5_HALLUCINATED]),
            "New Parameters:\nMaxConsecutiveAMShifts: most morning shifts in a row\n\n\
             New Variables:\nNone\n\nNew Constraints:\n\
             sum of nurseDaySlot[n,k,0] over k in a window of three days <= MaxConsecutiveAMShifts",
        ),
        ("nsp-repair", 4) => answer(SyntaxError, &[N7_ABS, N7_ABS, N7_ABS]),
        _ => ok(),
    }
}

fn instance(g: &Group) -> Instance {
    let file = match g.kind {
        ProblemKind::Gsp => "gsp_eval.json",
        _ => "nsp_eval.json",
    };
    let text = std::fs::read_to_string(root().join("instances").join(file)).unwrap();
    let mut inst = Instance::from_data_json(g.kind, &text).unwrap();
    if g.orig {
        let base: Model = build_model(&inst).unwrap();
        let best = solve(&base, &SolveLimits::default()).best.unwrap();
        let x = best.family(&base, g.kind.schedule_family()).unwrap();
        inst.set_array("origSchedule", &x.dims, &x.values);
    }
    for (k, v) in g.keys {
        inst.set_scalar(*k, *v);
    }
    inst
}

fn cases(groups: &[Group]) -> Vec<TestCase> {
    let mut out = Vec::new();
    for g in groups {
        let inst = instance(g);
        for (v, nl) in g.variants.iter().enumerate() {
            out.push(TestCase {
                id: format!("{}-{v}", g.id),
                group: g.id.to_string(),
                kind: g.kind,
                instance: inst.clone(),
                nl: nl.to_string(),
                target: g.target.to_string(),
            });
        }
    }
    out
}

fn script(name: &str, groups: &[Group], pick: fn(&str, usize) -> Answer) -> (ScriptedBackend, BTreeMap<String, Outcome>) {
    let mut backend = ScriptedBackend::new(name);
    let mut expected = BTreeMap::new();
    for g in groups {
        for (v, nl) in g.variants.iter().enumerate() {
            let a = pick(g.id, v);
            // An empty entry stands for the correct patch.
            let mut coding: Vec<String> = a
                .coding
                .iter()
                .map(|c| if c.is_empty() { g.target.to_string() } else { c.clone() })
                .collect();
            if coding.is_empty() {
                coding.push(g.target.to_string());
            }
            backend.add(
                nl,
                Script {
                    planning: vec![a.plan.unwrap_or_else(|| g.plan.to_string())],
                    coding,
                    paraphrase: Vec::new(),
                },
            );
            expected.insert(format!("{}-{v}", g.id), a.expect);
        }
    }
    (backend, expected)
}

fn main() {
    let groups = groups();
    let set = TestSet::new("eval70", cases(&groups));
    std::fs::create_dir_all(root().join("testsets")).unwrap();
    set.save(root().join("testsets/eval70.json")).unwrap();
    println!("{} cases written", set.cases.len());

    let store = dynsched_rag::seeded_store();
    let opts = EvalOptions::default();
    for (name, pick) in [("gpt4-replay", strong as fn(&str, usize) -> Answer), ("haiku-replay", weak)] {
        let (scripted, expected) = script(name, &groups, pick);
        let recorder = RecordingBackend::new(scripted);
        let run = run_testset(&set.cases, &recorder, &store, &opts).unwrap();
        let mut wrong = 0;
        for r in &run.records {
            if expected[&r.id] != r.outcome {
                wrong += 1;
                println!(
                    "  {}: expected {}, got {} (target {:?}, generated {:?}, error {:?})",
                    r.id,
                    expected[&r.id],
                    r.outcome,
                    r.target.objective,
                    r.generated.as_ref().map(|g| (g.status, g.objective)),
                    r.error
                );
            }
        }
        print!("{name}\n{}", run.table.render());
        assert_eq!(wrong, 0, "{name}: scripted outcomes differ from the plan");
        recorder.to_fixture(name).save(root().join(format!("fixtures/{name}.json"))).unwrap();
    }

    // Rewordings of each first request, as the paraphrase agent returns them.
    let mut para = ScriptedBackend::new("paraphrase-replay");
    for g in &groups {
        let listing: String = g.variants[1..]
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{}. {v}\n", i + 1))
            .collect();
        para.add(
            g.variants[0],
            Script {
                paraphrase: vec![listing],
                ..Script::default()
            },
        );
    }
    let recorder = RecordingBackend::new(para);
    for g in &groups {
        let out = paraphrase(g.variants[0], 4, &recorder).unwrap();
        assert_eq!(out.len(), 4);
    }
    recorder
        .to_fixture("paraphrase-replay")
        .save(root().join("fixtures/paraphrase-replay.json"))
        .unwrap();
}
