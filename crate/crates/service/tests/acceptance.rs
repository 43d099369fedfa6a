//! End-to-end acceptance checks. Each test covers one criterion and prints
//! a single `acceptance: PASS` or `acceptance: FAIL` line with its evidence.

mod support;

#[path = "../../core/tests/common/mod.rs"]
mod core_common;
#[path = "../../dsl/tests/support/ast_gen.rs"]
mod ast_gen;
#[path = "../../solver/tests/support/model_gen.rs"]
mod model_gen;

use std::cell::Cell;
use std::collections::BTreeMap;
use std::time::Instant;

use dynsched_agents::{Script, ScriptedBackend};
use dynsched_core::checkers::check_groups;
use dynsched_core::*;
use dynsched_dsl::ast::Patch as Ast;
use dynsched_dsl::{compile, parse, pretty_print};
use dynsched_eval::{interval_match, run_testset, EvalOptions, Outcome, TestSet};
use dynsched_service::ConstrainRequest;
use dynsched_solver::{brute_force, solve, SolveLimits, SolveStatus};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::motivating::{self, FEW_CHANGES, UNAVAILABLE};
use support::*;

/// Prints the verdict line and fails the test on a failed criterion.
fn verdict(criterion: &str, outcome: Result<String, String>) {
    match outcome {
        Ok(detail) => println!("acceptance: PASS {criterion}: {detail}"),
        Err(why) => {
            println!("acceptance: FAIL {criterion}: {why}");
            panic!("{criterion}: {why}");
        }
    }
}

fn check(cond: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(why())
    }
}

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn corpus() -> TestSet {
    TestSet::load(data_dir().join("testsets/eval70.json")).unwrap()
}

#[test]
fn solver_agrees_with_exhaustive_search() {
    let start = Instant::now();
    let seen = Cell::new(0usize);
    let result = runner(500).run(&model_gen::arb_model(), |m| {
        seen.set(seen.get() + 1);
        let oracle = brute_force(&m).unwrap();
        let got = solve(&m, &SolveLimits::default());
        prop_assert_eq!(got.status, oracle.status);
        prop_assert_eq!(got.objective, oracle.objective);
        Ok(())
    });
    let secs = start.elapsed().as_secs_f64();
    verdict(
        "solver-oracle equivalence",
        result
            .map_err(|e| e.to_string())
            .and_then(|()| check(secs < 60.0, || format!("took {secs:.1} s")))
            .map(|()| format!("{} random models agree on status and objective in {secs:.2} s", seen.get())),
    );
}

/// Verdicts of the grounded rows against the hand-written checkers.
fn agreement(inst: &Instance, seed: u64, samples: usize) -> Result<usize, String> {
    let model: Model = build_model(inst).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut compared = 0;
    for i in 0..samples {
        let a = core_common::random_assignment(&mut rng, inst, &model);
        let linear: BTreeMap<String, bool> = group_verdicts(&model, &a).into_iter().collect();
        for (name, ok) in check_groups(inst, &model, &a).map_err(|e| e.to_string())? {
            // A group without rows is vacuously satisfied.
            let lin = linear.get(name).copied().unwrap_or(true);
            check(lin == ok, || format!("sample {i}: group {name} grounded {lin}, checker {ok}"))?;
            compared += 1;
        }
    }
    Ok(compared)
}

#[test]
fn grounded_groups_match_procedural_checkers() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let gsp = core_common::gsp(&mut rng, 3, 8, 4);
    let nsp = core_common::nsp(&mut rng, 3, 7, 4);
    let result = agreement(&gsp, 1, 1000).and_then(|g| {
        agreement(&nsp, 2, 1000).map(|n| format!("1000 GSP and 1000 NSP assignments, {g} + {n} group verdicts agree"))
    });
    verdict("built-in model fidelity", result);
}

fn absence_rows(m: &Model) -> Vec<Constraint> {
    let (a, d1, d2) = (motivating::NURSE as usize, motivating::FIRST_DAY as usize, motivating::LAST_DAY as usize);
    let s_n = m.family("X").unwrap().family.dims[2];
    (d1..=d2)
        .flat_map(|d| (0..s_n).map(move |s| (d, s)))
        .map(|(d, s)| LinearConstraint::new([(1, m.var("X", &[a, d, s]).unwrap())], Relation::Eq, 0))
        .collect()
}

fn motivating_chain() -> Result<String, String> {
    let start = Instant::now();
    let e = motivating_engine();
    let err = |x: dynsched_service::ServiceError| x.to_string();
    let id = e.create_session(motivating::step_one_instance()).map_err(err)?.id;
    e.solve(&id, None).map_err(err)?;

    // (a) the absence, repaired once by the agents.
    let one = e.constrain(&id, &ConstrainRequest::nl(UNAVAILABLE)).map_err(err)?;
    let (rows, oracle) = e
        .with_session(&id, |s| {
            let p = s.pending.as_ref().unwrap();
            (p.step.grounded.groups.iter().flat_map(|g| g.constraints.clone()).collect::<Vec<_>>(), absence_rows(&s.model))
        })
        .map_err(err)?;
    check(rows == oracle, || format!("absence grounded to {} unexpected rows", rows.len()))?;
    check(one.report.status == SolveStatus::Optimal, || format!("step one {:?}", one.report.status))?;
    e.accept(&id).map_err(err)?;
    let cells = e.schedule(&id).map_err(err)?.cells;
    for d in motivating::FIRST_DAY as usize..=motivating::LAST_DAY as usize {
        for s in 0..cells.dims[2] {
            check(cells.get(&[motivating::NURSE as usize, d, s]) == Some(0), || format!("nurse works day {d}"))?;
        }
    }

    // (b) the change budget against the schedule just published.
    let t = 6;
    let two = e.constrain(&id, &ConstrainRequest::nl(FEW_CHANGES).with_t_perturb(t)).map_err(err)?;
    let (row, model) = e
        .with_session(&id, |s| {
            let p = s.pending.as_ref().unwrap();
            (p.step.grounded.groups[0].constraints.clone(), p.model.clone())
        })
        .map_err(err)?;
    check(row.len() == 1, || format!("{} rows for the budget", row.len()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let vals: Vec<i64> = (0..model.num_vars()).map(|_| rng.gen_range(0..2)).collect();
        let dist = hamming_distance(&Assignment::new(vals.clone()).family(&model, "X").unwrap(), &cells).unwrap() as i64;
        check(row[0].activity(&vals) - row[0].rhs == dist - t, || "budget row is not the Hamming distance".into())?;
    }
    check(two.report.status.has_solution() && two.hamming as i64 <= t, || format!("{} changes", two.hamming))?;
    let secs = start.elapsed().as_secs_f64();
    check(secs < 5.0, || format!("took {secs:.2} s"))?;
    Ok(format!(
        "absence grounds to {} rows after {} attempts, budget row equals Hamming distance, {} changes, {secs:.2} s",
        rows.len(),
        one.attempts,
        two.hamming
    ))
}

#[test]
fn motivating_example_end_to_end() {
    verdict("motivating example end to end", motivating_chain());
}

const BUDGET: &str = "param origSchedule[N, D, S]\nparam T_perturb\nconstraint hamming(X, origSchedule) <= T_perturb";

/// Optimal objective of `model` with the budget `t` against `orig`, or
/// `None` when infeasible. Also returns the schedule cells.
fn budgeted(model: &Model, inst: &Instance, orig: &Cells, t: Option<i64>) -> Result<Option<(i64, Cells)>, String> {
    let bounded = match t {
        None => model.clone(),
        Some(t) => {
            let mut inst = inst.clone();
            inst.set_array("origSchedule", &orig.dims, &orig.values);
            inst.set_scalar("T_perturb", t);
            let g = compile::<i64>(BUDGET, model, &inst).map_err(|e| e.render(BUDGET))?;
            apply_patch(model, &g.patch).map_err(|e| e.to_string())?
        }
    };
    let r = solve(&bounded, &SolveLimits::default());
    match r.status {
        SolveStatus::Optimal => {
            let cells = r.best.unwrap().family(&bounded, "X").unwrap();
            Ok(Some((r.objective.unwrap(), cells)))
        }
        SolveStatus::Infeasible => Ok(None),
        other => Err(format!("T = {t:?}: solver stopped with {other:?}")),
    }
}

fn monotonicity() -> Result<String, String> {
    let inst = motivating::step_one_instance();
    let base: Model = build_model(&inst).unwrap();
    let published = solve(&base, &SolveLimits::default());
    let orig = published.best.unwrap().family(&base, "X").unwrap();
    let absence = "param A\nparam D1\nparam D2\nconstraint forall d in D1..D2 + 1, s in 0..S: X[A, d, s] == 0";
    let repaired = apply_patch(&base, &compile::<i64>(absence, &base, &inst).unwrap().patch).unwrap();

    // The required budgets, plus a few larger ones where this instance
    // first becomes feasible.
    let budgets = [Some(0), Some(1), Some(2), Some(4), Some(6), Some(8), Some(12), None];
    let mut curve = Vec::new();
    for t in budgets {
        let r = budgeted(&repaired, &inst, &orig, t)?;
        if let (Some(0), Some((_, cells))) = (t, &r) {
            check(*cells == orig, || "T = 0 changed the schedule".into())?;
        }
        curve.push(r.map(|(v, _)| v));
    }
    // Infeasible points sort below every objective value.
    check(curve.windows(2).all(|w| w[0] <= w[1]), || format!("not monotone: {curve:?}"))?;
    check(curve.last().unwrap().is_some(), || "unbounded case infeasible".into())?;

    // Without the absence the published schedule is itself feasible, so a
    // zero budget must reproduce it cell for cell.
    let kept = budgeted(&base, &inst, &orig, Some(0))?.ok_or("zero budget infeasible on the base model")?;
    check(kept.1 == orig && Some(kept.0) == published.objective, || "zero budget moved the base schedule".into())?;
    let show: Vec<String> = budgets
        .iter()
        .zip(&curve)
        .map(|(t, v)| {
            let t = t.map_or("inf".to_string(), |t| t.to_string());
            format!("T={t}:{}", v.map_or("infeasible".to_string(), |v| v.to_string()))
        })
        .collect();
    Ok(format!("{}; T=0 reproduces the published schedule", show.join(" ")))
}

#[test]
fn perturbation_budget_is_monotone() {
    verdict("perturbation monotonicity", monotonicity());
}

fn hamming_exactness() -> Result<String, String> {
    let inst = Instance::from_data_json(
        ProblemKind::StaticNurse,
        r#"{"N":1,"D":4,"S":3,"M":1,"P":[[[1,0,1],[0,1,1],[1,1,0],[0,0,1]]]}"#,
    )
    .unwrap();
    let model: Model = build_model(&inst).unwrap();
    let fam = model.family("X").unwrap();
    check(fam.family.len() == 12, || format!("family has {} cells", fam.family.len()))?;
    let mut checked = 0;
    for orig_bits in [0b0000_0000_0000u32, 0b1010_0110_1001, 0b1111_1111_1111] {
        let orig: Vec<i64> = (0..12).map(|i| i64::from(orig_bits >> i & 1)).collect();
        let mut data = inst.clone();
        data.set_array("origSchedule", &fam.family.dims, &orig);
        data.set_scalar("T_perturb", 0);
        let g = compile::<i64>(BUDGET, &model, &data).map_err(|e| e.render(BUDGET))?;
        let row = &g.patch.groups[0].constraints[0];
        let reference = Cells {
            name: "X".into(),
            dims: fam.family.dims.clone(),
            values: orig.clone(),
        };
        for bits in 0u32..1 << 12 {
            let mut vals = vec![0; model.num_vars()];
            for i in 0..12 {
                vals[fam.offset + i] = i64::from(bits >> i & 1);
            }
            let cells = Assignment::new(vals.clone()).family(&model, "X").unwrap();
            let want = hamming_distance(&cells, &reference).unwrap() as i64;
            let got = row.activity(&vals) - row.rhs;
            check(got == want, || format!("assignment {bits:012b}: expression {got}, distance {want}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} assignments over three reference grids, all exact"))
}

#[test]
fn hamming_grounding_is_exact() {
    verdict("hamming grounding exactness", hamming_exactness());
}

fn replay() -> Result<String, String> {
    let set = corpus();
    let store = dynsched_rag::seeded_store();
    let strong = fixture("gpt4-replay");
    let err = |e: dynsched_eval::CaseSetupError| e.to_string();
    let a = run_testset(&set.cases, &strong, &store, &EvalOptions::default()).map_err(err)?;
    let gsp = a.table.row(ProblemKind::Gsp).tuple();
    let nsp = a.table.row(ProblemKind::Nsp).tuple();
    check(gsp == (0, 0, 0, 6, 29), || format!("GSP row {gsp:?}"))?;
    check(nsp == (0, 1, 0, 0, 34), || format!("NSP row {nsp:?}"))?;
    let single = EvalOptions {
        threads: Some(1),
        ..EvalOptions::default()
    };
    let b = run_testset(&set.cases, &strong, &store, &single).map_err(err)?;
    check(a.without_timing() == b.without_timing(), || "second run differs".into())?;
    let weak = run_testset(&set.cases, &fixture("haiku-replay"), &store, &EvalOptions::default()).map_err(err)?;
    let totals = weak.table.totals().tuple();
    check(totals == (12, 4, 6, 5, 43), || format!("weak totals {totals:?}"))?;
    Ok(format!("strong GSP {gsp:?} NSP {nsp:?}, identical on rerun; weak totals {totals:?}"))
}

#[test]
fn evaluation_replay_reproduces_tables() {
    verdict("evaluation replay", replay());
}

fn ratio_rule(a: (i64, i64), b: (i64, i64)) -> bool {
    let inter = (a.1.min(b.1) - a.0.max(b.0)).max(0) as f64;
    let union = (a.1.max(b.1) - a.0.min(b.0)) as f64;
    union == 0.0 || inter / union >= 0.5
}

fn interval_vector() -> Result<String, String> {
    check(interval_match(0i64, 10, 4, 12), || "(0,10,4,12) should match".into())?;
    check(!interval_match(0i64, 10, 5, 15), || "(0,10,5,15) should not match".into())?;
    check(interval_match(10i64, 10, 10, 10), || "(10,10,10,10) should match".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..1000 {
        let mut iv = || {
            let lo = rng.gen_range(-500i64..500);
            (lo, lo + rng.gen_range(0..300))
        };
        let (a, b) = (iv(), iv());
        let ab = interval_match(a.0, a.1, b.0, b.1);
        check(ab == interval_match(b.0, b.1, a.0, a.1), || format!("asymmetric on {a:?} {b:?}"))?;
        check(ab == ratio_rule(a, b), || format!("ratio rule differs on {a:?} {b:?}"))?;
    }
    Ok("three fixed cases hold; symmetric and rule-exact on 1000 random pairs".into())
}

#[test]
fn interval_match_vector() {
    verdict("interval match", interval_vector());
}

fn round_trip() -> Result<String, String> {
    let dir = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../dsl/corpus");
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "dsl"))
        .collect();
    files.sort();
    check(files.len() == 20, || format!("corpus has {} files", files.len()))?;
    for path in &files {
        let text = std::fs::read_to_string(path).unwrap();
        let name = path.file_name().unwrap().to_string_lossy();
        let p = parse(&text).map_err(|e| format!("{name}: {e}"))?;
        let printed = pretty_print(&p);
        let q = parse(&printed).map_err(|e| format!("{name} reprinted: {e}"))?;
        check(p.same_structure(&q), || format!("{name} changed shape"))?;
    }
    let seen = Cell::new(0usize);
    runner(200)
        .run(&prop::collection::vec(ast_gen::decl(), 0..5), |decls| {
            seen.set(seen.get() + 1);
            let p = Ast {
                decls,
                source: String::new(),
            };
            let printed = pretty_print(&p);
            let q = parse(&printed).map_err(|e| TestCaseError::fail(format!("{e}\n{printed}")))?;
            prop_assert!(p.same_structure(&q), "{}", printed);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("{} corpus patches and {} random trees survive print then parse", files.len(), seen.get()))
}

#[test]
fn dsl_round_trip() {
    verdict("DSL round trip", round_trip());
}

fn self_match() -> Result<String, String> {
    let set = corpus();
    let mut backend = ScriptedBackend::new("reference");
    for c in &set.cases {
        backend.add(
            &c.nl,
            Script {
                planning: vec!["New Parameters:\nNone\nNew Variables:\nNone\nNew Constraints:\nas requested".into()],
                coding: vec![c.target.clone()],
                paraphrase: Vec::new(),
            },
        );
    }
    let run = run_testset(&set.cases, &backend, &dynsched_rag::seeded_store(), &EvalOptions::default())
        .map_err(|e| e.to_string())?;
    let matched = run.records.iter().filter(|r| r.outcome == Outcome::Match).count();
    let misses: Vec<&str> = run
        .records
        .iter()
        .filter(|r| r.outcome != Outcome::Match)
        .map(|r| r.id.as_str())
        .collect();
    check(matched == set.cases.len() && matched == 70, || format!("{matched}/70, misses {misses:?}"))?;
    Ok(format!("{matched}/{} cases match their own reference", set.cases.len()))
}

#[test]
fn reference_patches_match_themselves() {
    verdict("self-match", self_match());
}
