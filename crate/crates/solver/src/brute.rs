use std::time::Instant;

use dynsched_core::{Assignment, ModelIr, Scalar, Sense};
use thiserror::Error;

use crate::report::{Bound, SolveReport, SolveStatus};

/// Largest domain product [`brute_force`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BruteForceError {
    #[error("search space of {size} assignments exceeds the limit of {limit}")]
    TooLarge { size: String, limit: u128 },
}

/// Enumerates every assignment in lexicographic order (last variable fastest)
/// and keeps the first one with the best objective.
pub fn brute_force<S: Scalar>(model: &ModelIr<S>) -> Result<SolveReport<S>, BruteForceError> {
    let start = Instant::now();
    let bounds = model.bounds();
    let mut size: u128 = 1;
    for &(lo, hi) in &bounds {
        let width = (hi.widen() - lo.widen() + 1) as u128;
        size = size.saturating_mul(width);
        if size > BRUTE_FORCE_LIMIT {
            return Err(BruteForceError::TooLarge {
                size: if size == u128::MAX { "more than 2^128".into() } else { format!("at least {size}") },
                limit: BRUTE_FORCE_LIMIT,
            });
        }
    }

    let rows: Vec<_> = model.groups.iter().flat_map(|g| &g.constraints).collect();
    let maximize = model.objective.sense == Sense::Maximize;
    let mut values: Vec<S> = bounds.iter().map(|b| b.0).collect();
    let mut best: Option<(Vec<S>, S)> = None;
    let mut nodes = 0u64;
    loop {
        nodes += 1;
        if rows.iter().all(|c| c.holds(&values)) {
            let obj = model.objective.expr.value(&values);
            let better = match &best {
                None => true,
                Some((_, b)) => (maximize && obj > *b) || (!maximize && obj < *b),
            };
            if better {
                best = Some((values.clone(), obj));
            }
        }
        // Odometer step.
        let mut i = values.len();
        loop {
            if i == 0 {
                return Ok(report(best, maximize, nodes, start));
            }
            i -= 1;
            if values[i] < bounds[i].1 {
                values[i] = values[i] + S::one();
                break;
            }
            values[i] = bounds[i].0;
        }
    }
}

fn report<S: Scalar>(best: Option<(Vec<S>, S)>, maximize: bool, nodes: u64, start: Instant) -> SolveReport<S> {
    let wall_time = start.elapsed().as_secs_f64();
    match best {
        Some((values, obj)) => SolveReport {
            status: SolveStatus::Optimal,
            best: Some(Assignment::new(values)),
            objective: Some(obj),
            lower_bound: Bound::Finite(obj),
            upper_bound: Bound::Finite(obj),
            nodes,
            wall_time,
        },
        None => {
            let inf = if maximize { Bound::NegInf } else { Bound::PosInf };
            SolveReport {
                status: SolveStatus::Infeasible,
                best: None,
                objective: None,
                lower_bound: inf,
                upper_bound: inf,
                nodes,
                wall_time,
            }
        }
    }
}
