//! Exact branch-and-bound solver for the linear integer model IR, and a
//! brute-force enumerator used as its test oracle.

mod brute;
mod engine;
mod report;
mod search;

pub use brute::{brute_force, BruteForceError, BRUTE_FORCE_LIMIT};
pub use report::{Bound, SolveLimits, SolveReport, SolveStatus};
pub use search::solve;

pub type Report = SolveReport<dynsched_core::Int>;
