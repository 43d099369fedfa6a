//! Rewrites data/fixtures/motivating.json by running the two-step nurse
//! scenario against scripted answers and recording every exchange.
//!
//! cargo run -p dynsched-agents --example record_motivating

#[path = "../tests/support/motivating.rs"]
mod motivating;

use dynsched_agents::{run_pipeline, AgentContext, RecordingBackend};
use dynsched_core::{apply_patch, build_model, Model};
use dynsched_solver::{solve, SolveLimits};

fn main() {
    let store = dynsched_rag::seeded_store();
    let recorder = RecordingBackend::new(motivating::scripted());

    let one = motivating::step_one_instance();
    let base: Model = build_model(&one).unwrap();
    let r1 = run_pipeline(&AgentContext::new(&base, &one, &store), motivating::UNAVAILABLE, &recorder).unwrap();
    let first = apply_patch(&base, &r1.grounded).unwrap();

    let published = solve(&base, &SolveLimits::default()).best.unwrap();
    let x = published.family(&base, "X").unwrap();
    let two = motivating::step_two_instance(&x.values, &x.dims, 6);
    run_pipeline(&AgentContext::new(&first, &two, &store), motivating::FEW_CHANGES, &recorder).unwrap();

    let fixture = recorder.to_fixture("motivating");
    fixture.save(motivating::fixture_path()).unwrap();
    println!("{} records written", fixture.records.len());
}
