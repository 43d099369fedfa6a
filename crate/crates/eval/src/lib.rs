//! Automatic evaluation of the agents against a reference test set.
//!
//! Each case pairs a request with a reference patch. Both the reference
//! and the generated patch are applied to the base model and solved under
//! the same limits; [`classify_outcome`] turns the two results into one of
//! five [`Outcome`]s and [`run_testset`] tabulates them per problem kind.

mod hallucination;
mod outcome;
mod run;
mod testset;

pub use hallucination::detect_hallucinated_params;
pub use outcome::{bounds_match, classify_outcome, interval_match, Generated, Outcome};
pub use run::{
    default_eval_limits, evaluate_case, run_testset, CaseRecord, CaseSetupError, Counts, EvalOptions, EvalRun,
    ResultsTable, SolveCache, SolveSummary,
};
pub use testset::{TestCase, TestSet, TestSetError, TESTSET_FORMAT};
