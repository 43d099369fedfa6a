//! Every built-in constraint group checked twice: once through the grounded
//! linear rows, once through the procedural checkers.

mod common;

use std::collections::BTreeMap;

use common::*;
use dynsched_core::checkers::{check_groups, gsp_max_block_by_end_markers};
use dynsched_core::{build_model, evaluate_assignment, group_verdicts, Instance, Model};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn agree_on_random_assignments(inst: &Instance, seed: u64, samples: usize) {
    let model: Model = build_model(inst).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for i in 0..samples {
        let a = random_assignment(&mut rng, inst, &model);
        let linear = group_verdicts(&model, &a);
        let procedural = check_groups(inst, &model, &a).unwrap();
        let linear_names: Vec<&str> = linear.iter().map(|(n, _)| n.as_str()).collect();
        // Groups that ground to zero rows are vacuous on both sides.
        let present: Vec<(&str, bool)> = procedural
            .iter()
            .copied()
            .filter(|(n, _)| linear_names.contains(n))
            .collect();
        assert_eq!(linear_names, present.iter().map(|p| p.0).collect::<Vec<_>>());
        for ((name, lin), (_, proc_)) in linear.iter().zip(&present) {
            assert_eq!(lin, proc_, "sample {i}: group {name} disagrees");
            let e = seen.entry(name.clone()).or_default();
            if *lin {
                e.0 += 1;
            } else {
                e.1 += 1;
            }
        }
        for (name, ok) in &procedural {
            if !linear_names.contains(name) {
                assert!(ok, "{name} has no rows but the checker rejects");
            }
        }
        let report = evaluate_assignment(&model, &a).unwrap();
        assert_eq!(report.feasible, linear.iter().all(|(_, ok)| *ok));
    }
    for (name, (sat, unsat)) in &seen {
        assert!(*sat > 0 && *unsat > 0, "{name} only ever saw one verdict: {sat} sat, {unsat} unsat");
    }
}

#[test]
fn gsp_groups_match_checkers() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let inst = gsp(&mut rng, 3, 8, 4);
    agree_on_random_assignments(&inst, 1, 1000);
}

#[test]
fn nsp_groups_match_checkers() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let inst = nsp(&mut rng, 3, 7, 4);
    agree_on_random_assignments(&inst, 2, 1000);
}

#[test]
fn nsp_two_weeks_match_checkers() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let inst = nsp(&mut rng, 2, 16, 4);
    agree_on_random_assignments(&inst, 3, 300);
}

#[test]
fn static_nurse_groups_match_checkers() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let prefs = random_bits(&mut rng, 3 * 3 * 2, 0.5);
    let inst = static_nurse(3, 3, 2, 2, &prefs);
    agree_on_random_assignments(&inst, 4, 500);
}

#[test]
fn max_block_forms_agree_on_consistent_markers() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for round in 0..5 {
        let inst = gsp(&mut rng, 3, 8 + round, 2);
        let model: Model = build_model(&inst).unwrap();
        let mut outcomes = (0, 0);
        for _ in 0..400 {
            let mut a = random_assignment(&mut rng, &inst, &model);
            derive_blocks(&inst, &model, &mut a);
            let linear = model
                .group("MaxBlockLength")
                .is_none_or(|g| g.constraints.iter().all(|c| c.holds(&a.values)));
            let by_markers = gsp_max_block_by_end_markers(&inst, &model, &a).unwrap();
            assert_eq!(linear, by_markers);
            if linear {
                outcomes.0 += 1;
            } else {
                outcomes.1 += 1;
            }
        }
        assert!(outcomes.0 > 0 && outcomes.1 > 0, "{outcomes:?}");
    }
}
