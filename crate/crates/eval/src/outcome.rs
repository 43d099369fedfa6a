//! Outcome classes and the rules that assign them.

use std::fmt;

use dynsched_agents::Failure;
use dynsched_core::Int;
use dynsched_solver::{Bound, SolveReport, SolveStatus};
use num_traits::{PrimInt, Signed};
use serde::{Deserialize, Serialize};

/// Result class of one evaluated case, in table column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Outcome {
    DataKeyError,
    SyntaxError,
    Infeasible,
    FeasibleNotMatch,
    Match,
}

impl Outcome {
    pub const ALL: [Outcome; 5] = [
        Outcome::DataKeyError,
        Outcome::SyntaxError,
        Outcome::Infeasible,
        Outcome::FeasibleNotMatch,
        Outcome::Match,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::DataKeyError => "DataKeyError",
            Outcome::SyntaxError => "SyntaxError",
            Outcome::Infeasible => "Infeasible",
            Outcome::FeasibleNotMatch => "FeasibleNotMatch",
            Outcome::Match => "Match",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Whether two bound intervals overlap on at least half of their union.
/// Touching or identical points count as a match when the union is empty.
/// Computed exactly as `2 * overlap >= union`.
pub fn interval_match<T: PrimInt + Signed>(lb1: T, ub1: T, lb2: T, ub2: T) -> bool {
    let inter = (ub1.min(ub2) - lb1.max(lb2)).max(T::zero());
    let union = ub1.max(ub2) - lb1.min(lb2);
    inter + inter >= union
}

/// Interval check on solver bounds. Infinite ends only match identical
/// intervals, since the ratio is undefined.
pub fn bounds_match(a: &SolveReport<Int>, b: &SolveReport<Int>) -> bool {
    match (
        a.lower_bound.finite(),
        a.upper_bound.finite(),
        b.lower_bound.finite(),
        b.upper_bound.finite(),
    ) {
        (Some(l1), Some(u1), Some(l2), Some(u2)) => interval_match(l1 as i128, u1 as i128, l2 as i128, u2 as i128),
        _ => a.lower_bound == b.lower_bound && a.upper_bound == b.upper_bound && a.lower_bound != Bound::NegInf,
    }
}

/// What the generated side produced.
#[derive(Debug, Clone, Copy)]
pub enum Generated<'a> {
    /// The agents gave up.
    Failed(&'a Failure),
    /// The patch compiled but could not be applied to the model.
    Rejected(&'a str),
    Solved(&'a SolveReport<Int>),
}

/// Assigns the outcome of one case. Precedence: data-key errors, other
/// patch errors, no generated solution, then objective comparison (both
/// optimal) or bound overlap (otherwise).
pub fn classify_outcome(target: &SolveReport<Int>, generated: Generated<'_>) -> Outcome {
    let gen = match generated {
        Generated::Failed(Failure::FixExhausted { error, .. }) if error.is_data_key_error() => {
            return Outcome::DataKeyError
        }
        Generated::Failed(_) | Generated::Rejected(_) => return Outcome::SyntaxError,
        Generated::Solved(r) => r,
    };
    if !gen.status.has_solution() {
        return Outcome::Infeasible;
    }
    if !target.status.has_solution() {
        return Outcome::FeasibleNotMatch;
    }
    let same = if target.status == SolveStatus::Optimal && gen.status == SolveStatus::Optimal {
        target.objective == gen.objective
    } else {
        bounds_match(target, gen)
    };
    if same {
        Outcome::Match
    } else {
        Outcome::FeasibleNotMatch
    }
}
