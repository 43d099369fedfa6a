use std::time::Instant;

use dynsched_core::{Assignment, ModelIr, Scalar};

use crate::engine::{Domains, Move, Problem};
use crate::report::{Bound, SolveLimits, SolveReport, SolveStatus};

/// Solves `model` exactly by depth-first branch and bound.
///
/// Variables are branched in id order (family declaration order, row-major
/// within a family). Booleans try 1 before 0; wider integer domains are split
/// at the midpoint, lower half first. The search is single-threaded and fully
/// deterministic; only `wall_time` differs between identical runs, unless the
/// time limit cuts the search short.
pub fn solve<S: Scalar>(model: &ModelIr<S>, limits: &SolveLimits) -> SolveReport<S> {
    let limits = limits.sanitized();
    let start = Instant::now();
    let mut problem = Problem::new(model);
    let mut search = Search {
        domains: Domains::new(&problem),
        incumbent: None,
        nodes: 0,
        open: Vec::new(),
        open_min: None,
        aborted: false,
        scratch: Vec::new(),
        start,
        limits,
    };
    if search.domains.propagate_all(&problem).is_ok() {
        search.dive(&mut problem, 0);
    }
    search.finish(&problem, start)
}

struct Search {
    domains: Domains,
    /// Best complete assignment and its objective (minimization form).
    incumbent: Option<(Vec<i128>, i128)>,
    nodes: u64,
    /// Relaxation bounds of the nodes on the current path, used to report an
    /// honest dual bound when a limit stops the search.
    open: Vec<i128>,
    open_min: Option<i128>,
    aborted: bool,
    scratch: Vec<Move>,
    start: Instant,
    limits: SolveLimits,
}

impl Search {
    fn out_of_budget(&self) -> bool {
        if let Some(max) = self.limits.node_limit {
            if self.nodes >= max {
                return true;
            }
        }
        self.start.elapsed().as_secs_f64() >= self.limits.time_limit
    }

    /// Explores the subtree under the current (already propagated) domains.
    /// Variables before `first` are known to be fixed.
    fn dive(&mut self, p: &mut Problem, first: usize) {
        if self.aborted {
            return;
        }
        if self.out_of_budget() {
            self.aborted = true;
            self.open_min = self.open.iter().copied().min();
            return;
        }
        self.nodes += 1;

        // The cutoff may have moved since this node was propagated.
        if self.incumbent.is_some() && self.domains.propagate_row(p, p.cutoff_row).is_err() {
            return;
        }
        let Some(bound) = p.relaxation.bound(p, &self.domains, &mut self.scratch) else {
            return;
        };
        if let Some((_, best)) = &self.incumbent {
            if bound >= *best {
                return;
            }
        }

        let Some(v) = (first..p.num_vars()).find(|&v| !self.domains.is_fixed(v)) else {
            let x = self.domains.lo.clone();
            let value = p.value(&x);
            // Propagation at a full assignment is exact, and the cutoff row
            // admits only strict improvements.
            debug_assert!(self.incumbent.as_ref().is_none_or(|(_, b)| value < *b));
            p.rows[p.cutoff_row].hi = value - 1 - p.constant;
            self.incumbent = Some((x, value));
            return;
        };

        self.open.push(bound);
        let (lo, hi) = (self.domains.lo[v], self.domains.hi[v]);
        let branches = if hi - lo == 1 && lo == 0 {
            [(1, 1), (0, 0)]
        } else {
            let mid = lo + (hi - lo).div_euclid(2);
            [(lo, mid), (mid + 1, hi)]
        };
        for (blo, bhi) in branches {
            let level = self.domains.level();
            if self.domains.decide(p, v, blo, bhi).is_ok() {
                self.dive(p, v);
            }
            self.domains.backtrack(level);
            if self.aborted {
                break;
            }
        }
        self.open.pop();
    }

    fn finish<S: Scalar>(self, p: &Problem, start: Instant) -> SolveReport<S> {
        let incumbent = self.incumbent;
        let status = match (&incumbent, self.aborted) {
            (Some(_), false) => SolveStatus::Optimal,
            (None, false) => SolveStatus::Infeasible,
            (Some(_), true) => SolveStatus::Feasible,
            (None, true) => SolveStatus::Unknown,
        };

        // Minimization-form bounds.
        let primal = incumbent.as_ref().map(|(_, v)| *v);
        let dual: Option<i128> = match status {
            SolveStatus::Optimal => primal,
            SolveStatus::Infeasible => None,
            _ => {
                match (self.open_min, primal) {
                    (Some(o), Some(b)) => Some(o.min(b)),
                    (Some(o), None) => Some(o),
                    (None, b) => b,
                }
            }
        };
        let (lower, upper): (Bound<S>, Bound<S>) = {
            let dual_b = match (status, dual) {
                (SolveStatus::Infeasible, _) => Bound::PosInf,
                (_, Some(d)) => Bound::from_wide(d),
                (_, None) => Bound::NegInf,
            };
            let primal_b = primal.map_or(Bound::PosInf, Bound::from_wide);
            (dual_b, primal_b)
        };

        let best = incumbent.map(|(x, _)| {
            Assignment::new(
                x.into_iter()
                    .map(|v| S::narrow(v).expect("value within model bounds"))
                    .collect(),
            )
        });
        let objective = primal.map(|v| {
            let v = if p.negated { -v } else { v };
            S::narrow(v).expect("objective fits the scalar type")
        });
        let (lower_bound, upper_bound) = if p.negated {
            (upper.negate(), lower.negate())
        } else {
            (lower, upper)
        };
        SolveReport {
            status,
            best,
            objective,
            lower_bound,
            upper_bound,
            nodes: self.nodes,
            wall_time: start.elapsed().as_secs_f64(),
        }
    }
}
