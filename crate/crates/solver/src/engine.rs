//! Normalized problem, domain store and bounds propagation.
//!
//! Every model constraint becomes a ranged row `lo <= a.x <= hi` over `i128`
//! so that coefficient products never overflow the caller's scalar type. The
//! objective is always minimized here; maximization is negated on the way in.

use std::collections::VecDeque;

use dynsched_core::{ModelIr, Relation, Scalar};

pub(crate) const NONE: i128 = i128::MAX;

#[derive(Debug, Clone)]
pub(crate) struct Row {
    pub terms: Vec<(i128, usize)>,
    /// `NONE` encodes a missing side.
    pub lo: i128,
    pub hi: i128,
}

impl Row {
    fn has_lo(&self) -> bool {
        self.lo != NONE
    }

    fn has_hi(&self) -> bool {
        self.hi != NONE
    }
}

pub(crate) struct Problem {
    pub rows: Vec<Row>,
    pub var_rows: Vec<Vec<usize>>,
    /// Minimization coefficients, one per variable (zero if absent).
    pub cost: Vec<i128>,
    pub cost_terms: Vec<(i128, usize)>,
    pub constant: i128,
    pub negated: bool,
    pub root_lo: Vec<i128>,
    pub root_hi: Vec<i128>,
    /// Index of the objective cutoff row inside `rows`.
    pub cutoff_row: usize,
    pub relaxation: Relaxation,
}

impl Problem {
    pub fn new<S: Scalar>(model: &ModelIr<S>) -> Self {
        let n = model.num_vars();
        let (root_lo, root_hi): (Vec<i128>, Vec<i128>) = model
            .bounds()
            .into_iter()
            .map(|(l, h)| (l.widen(), h.widen()))
            .unzip();

        let mut rows = Vec::new();
        for group in &model.groups {
            for c in &group.constraints {
                let terms: Vec<(i128, usize)> = c.terms.iter().map(|&(a, v)| (a.widen(), v.0)).collect();
                let rhs = c.rhs.widen();
                let (lo, hi) = match c.relation {
                    Relation::Le => (NONE, rhs),
                    Relation::Ge => (rhs, NONE),
                    Relation::Eq => (rhs, rhs),
                };
                rows.push(Row { terms, lo, hi });
            }
        }

        let negated = model.objective.sense == dynsched_core::Sense::Maximize;
        let sign = if negated { -1 } else { 1 };
        let mut cost = vec![0i128; n];
        for &(a, v) in &model.objective.expr.terms {
            cost[v.0] += sign * a.widen();
        }
        let cost_terms: Vec<(i128, usize)> = cost
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (c, i))
            .collect();
        let constant = sign * model.objective.expr.constant.widen();

        let relaxation = Relaxation::choose(&rows, &cost, n);

        let cutoff_row = rows.len();
        rows.push(Row {
            terms: cost_terms.clone(),
            lo: NONE,
            hi: NONE,
        });

        let mut var_rows = vec![Vec::new(); n];
        for (r, row) in rows.iter().enumerate() {
            for &(_, v) in &row.terms {
                var_rows[v].push(r);
            }
        }

        Problem {
            rows,
            var_rows,
            cost,
            cost_terms,
            constant,
            negated,
            root_lo,
            root_hi,
            cutoff_row,
            relaxation,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.root_lo.len()
    }

    /// Objective value (minimization form) of a complete assignment.
    pub fn value(&self, x: &[i128]) -> i128 {
        self.constant + self.cost_terms.iter().map(|&(c, v)| c * x[v]).sum::<i128>()
    }
}

/// Domains plus an undo trail.
pub(crate) struct Domains {
    pub lo: Vec<i128>,
    pub hi: Vec<i128>,
    trail: Vec<(usize, i128, i128)>,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
}

pub(crate) struct Conflict;

impl Domains {
    pub fn new(p: &Problem) -> Self {
        Domains {
            lo: p.root_lo.clone(),
            hi: p.root_hi.clone(),
            trail: Vec::new(),
            queue: VecDeque::new(),
            queued: vec![false; p.rows.len()],
        }
    }

    pub fn level(&self) -> usize {
        self.trail.len()
    }

    pub fn backtrack(&mut self, level: usize) {
        while self.trail.len() > level {
            let (v, lo, hi) = self.trail.pop().expect("trail underflow");
            self.lo[v] = lo;
            self.hi[v] = hi;
        }
    }

    pub fn is_fixed(&self, v: usize) -> bool {
        self.lo[v] == self.hi[v]
    }

    fn tighten(&mut self, p: &Problem, v: usize, lo: i128, hi: i128) -> Result<(), Conflict> {
        let (old_lo, old_hi) = (self.lo[v], self.hi[v]);
        let new_lo = old_lo.max(lo);
        let new_hi = old_hi.min(hi);
        if new_lo > new_hi {
            return Err(Conflict);
        }
        if new_lo != old_lo || new_hi != old_hi {
            self.trail.push((v, old_lo, old_hi));
            self.lo[v] = new_lo;
            self.hi[v] = new_hi;
            for &r in &p.var_rows[v] {
                self.enqueue(r);
            }
        }
        Ok(())
    }

    fn enqueue(&mut self, r: usize) {
        if !self.queued[r] {
            self.queued[r] = true;
            self.queue.push_back(r);
        }
    }

    /// Restricts `v` to `[lo, hi]` and propagates to a fixpoint.
    pub fn decide(&mut self, p: &Problem, v: usize, lo: i128, hi: i128) -> Result<(), Conflict> {
        self.tighten(p, v, lo, hi)?;
        self.propagate(p)
    }

    /// Propagates every row, e.g. at the root or after the cutoff moved.
    pub fn propagate_all(&mut self, p: &Problem) -> Result<(), Conflict> {
        for r in 0..p.rows.len() {
            self.enqueue(r);
        }
        self.propagate(p)
    }

    pub fn propagate_row(&mut self, p: &Problem, r: usize) -> Result<(), Conflict> {
        self.enqueue(r);
        self.propagate(p)
    }

    fn propagate(&mut self, p: &Problem) -> Result<(), Conflict> {
        let result = self.run_queue(p);
        if result.is_err() {
            for r in self.queue.drain(..) {
                self.queued[r] = false;
            }
        }
        result
    }

    fn run_queue(&mut self, p: &Problem) -> Result<(), Conflict> {
        while let Some(r) = self.queue.pop_front() {
            self.queued[r] = false;
            let row = &p.rows[r];
            let (mut min_act, mut max_act) = (0i128, 0i128);
            for &(a, v) in &row.terms {
                if a > 0 {
                    min_act += a * self.lo[v];
                    max_act += a * self.hi[v];
                } else {
                    min_act += a * self.hi[v];
                    max_act += a * self.lo[v];
                }
            }
            if (row.has_hi() && min_act > row.hi) || (row.has_lo() && max_act < row.lo) {
                return Err(Conflict);
            }
            let hi_slack = if row.has_hi() { row.hi - min_act } else { NONE };
            let lo_slack = if row.has_lo() { max_act - row.lo } else { NONE };
            for &(a, v) in &row.terms {
                let width = a.abs() * (self.hi[v] - self.lo[v]);
                let tight_hi = hi_slack != NONE && width > hi_slack;
                let tight_lo = lo_slack != NONE && width > lo_slack;
                if !tight_hi && !tight_lo {
                    continue;
                }
                let (mut lo, mut hi) = (self.lo[v], self.hi[v]);
                if tight_hi {
                    // a*x <= a*x_min_side + hi_slack
                    if a > 0 {
                        hi = hi.min(self.lo[v] + div_floor(hi_slack, a));
                    } else {
                        lo = lo.max(self.hi[v] - div_floor(hi_slack, -a));
                    }
                }
                if tight_lo {
                    // a*x >= a*x_max_side - lo_slack
                    if a > 0 {
                        lo = lo.max(self.hi[v] - div_floor(lo_slack, a));
                    } else {
                        hi = hi.min(self.lo[v] + div_floor(lo_slack, -a));
                    }
                }
                self.tighten(p, v, lo, hi)?;
            }
        }
        Ok(())
    }
}

pub(crate) fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

pub(crate) fn div_ceil(a: i128, b: i128) -> i128 {
    -div_floor(-a, b)
}

/// Objective lower bound from single-row relaxations.
///
/// The objective variables are split into disjoint sets, each owned by one
/// row. For every owning row the bound is the continuous minimum of its owned
/// cost terms over the current box, subject to that row with all other terms
/// at their extreme activities (a fractional knapsack, solved greedily and
/// exactly). Unowned objective variables contribute `cost * bound` by sign.
/// The sum is rounded up, as the objective is integral. Exactly-one rows over
/// booleans recover the usual clique bound as a special case.
pub(crate) struct Relaxation {
    owners: Vec<Owner>,
    loose: Vec<usize>,
}

struct Owner {
    row: usize,
    /// Per term of the row: does this row own the term's cost?
    mine: Vec<bool>,
}

/// A way to shift a row's owned activity by one unit at cost `num / den`.
#[derive(Clone, Copy)]
pub(crate) struct Move {
    num: i128,
    den: i128,
    cap: i128,
}

impl Relaxation {
    fn choose(rows: &[Row], cost: &[i128], n: usize) -> Self {
        let mut order: Vec<(usize, usize)> = rows
            .iter()
            .enumerate()
            .map(|(r, row)| (r, row.terms.iter().filter(|(_, v)| cost[*v] != 0).count()))
            .filter(|&(_, k)| k > 0)
            .collect();
        // Equalities first, then rows owning more objective terms; stable.
        order.sort_by_key(|&(r, k)| (rows[r].lo != rows[r].hi, std::cmp::Reverse(k), r));

        let mut owned = vec![false; n];
        let mut owners = Vec::new();
        for (r, _) in order {
            let terms = &rows[r].terms;
            if terms.iter().any(|(_, v)| cost[*v] != 0 && owned[*v]) {
                continue;
            }
            let mine: Vec<bool> = terms.iter().map(|(_, v)| cost[*v] != 0).collect();
            for (_, v) in terms {
                if cost[*v] != 0 {
                    owned[*v] = true;
                }
            }
            owners.push(Owner { row: r, mine });
        }
        let loose = (0..n).filter(|&v| cost[v] != 0 && !owned[v]).collect();
        Relaxation { owners, loose }
    }

    /// `None` if some row relaxation is already infeasible over the box.
    pub fn bound(&self, p: &Problem, d: &Domains, scratch: &mut Vec<Move>) -> Option<i128> {
        let mut total = p.constant;
        for &v in &self.loose {
            let c = p.cost[v];
            total += if c > 0 { c * d.lo[v] } else { c * d.hi[v] };
        }
        for owner in &self.owners {
            total += row_relaxation(&p.rows[owner.row], &owner.mine, &p.cost, d, scratch)?;
        }
        Some(total)
    }
}

fn row_relaxation(row: &Row, mine: &[bool], cost: &[i128], d: &Domains, moves: &mut Vec<Move>) -> Option<i128> {
    // Owned variables start at their cheapest bound; the rest contribute
    // their activity range.
    let (mut rest_min, mut rest_max) = (0i128, 0i128);
    let (mut base, mut act) = (0i128, 0i128);
    for (&(a, v), &own) in row.terms.iter().zip(mine) {
        let (lo, hi) = (d.lo[v], d.hi[v]);
        if !own {
            let (x, y) = (a * lo, a * hi);
            rest_min += x.min(y);
            rest_max += x.max(y);
            continue;
        }
        let x = if cost[v] > 0 { lo } else { hi };
        base += cost[v] * x;
        act += a * x;
    }
    let need_up = if row.lo != NONE { row.lo - rest_max - act } else { 0 };
    let need_down = if row.hi != NONE { act - (row.hi - rest_min) } else { 0 };
    let (mut need, upward) = if need_up > 0 {
        (need_up, true)
    } else if need_down > 0 {
        (need_down, false)
    } else {
        return Some(base);
    };

    // Moving x by +1 changes activity by a and cost by c. Collect the moves
    // that push activity in the needed direction; all cost >= 0 per unit.
    moves.clear();
    for (&(a, v), &own) in row.terms.iter().zip(mine) {
        if !own {
            continue;
        }
        let c = cost[v];
        let x = if c > 0 { d.lo[v] } else { d.hi[v] };
        let room = if c > 0 { d.hi[v] - x } else { x - d.lo[v] };
        if room == 0 {
            continue;
        }
        // Raising x when c > 0, lowering it when c < 0.
        let delta_act = if c > 0 { a } else { -a };
        if (delta_act > 0) == upward && delta_act != 0 {
            moves.push(Move {
                num: c.abs(),
                den: delta_act.abs(),
                cap: delta_act.abs() * room,
            });
        }
    }
    moves.sort_by(|x, y| (x.num * y.den).cmp(&(y.num * x.den)));
    let mut extra = 0i128;
    for m in moves.iter() {
        let take = need.min(m.cap);
        if take % m.den == 0 {
            extra += m.num * (take / m.den);
        } else {
            // Only the last move can be fractional. Rounding it up keeps a
            // valid bound because this row's owned cost is integral.
            extra += div_ceil(m.num * take, m.den);
        }
        need -= take;
        if need == 0 {
            return Some(base + extra);
        }
    }
    None
}
