//! Hand-written procedural checkers for the built-in models.
//!
//! These read the instance arrays and the assignment cell by cell, without
//! going through [`LinearConstraint`](crate::model::LinearConstraint), so
//! they serve as a second, independent account of every constraint group.

use crate::assignment::{Assignment, FamilyValues};
use crate::error::ModelError;
use crate::instance::{Instance, ProblemKind};
use crate::model::ModelIr;
use crate::num::Scalar;

/// Feasibility verdict for every built-in group of `instance.kind`, in the
/// order the builder declares them.
pub fn check_groups<S: Scalar>(
    instance: &Instance,
    model: &ModelIr<S>,
    assignment: &Assignment<S>,
) -> Result<Vec<(&'static str, bool)>, ModelError> {
    let view = |name: &str| -> Result<Grid, ModelError> { Grid::new(assignment.family(model, name)?) };
    match instance.kind {
        ProblemKind::Gsp => gsp(instance, view),
        ProblemKind::Nsp => nsp(instance, view),
        ProblemKind::StaticNurse => static_nurse(instance, view),
    }
}

/// Integer copy of a family with plain indexing.
struct Grid {
    dims: Vec<usize>,
    values: Vec<i64>,
}

impl Grid {
    fn new<S: Scalar>(f: FamilyValues<S>) -> Result<Self, ModelError> {
        Ok(Grid {
            values: f.to_i64(),
            dims: f.dims,
        })
    }

    fn at(&self, idx: &[usize]) -> i64 {
        let mut flat = 0;
        for (&d, &i) in self.dims.iter().zip(idx) {
            assert!(i < d);
            flat = flat * d + i;
        }
        self.values[flat]
    }

    fn on(&self, idx: &[usize]) -> bool {
        self.at(idx) == 1
    }
}

fn gsp(
    inst: &Instance,
    view: impl Fn(&str) -> Result<Grid, ModelError>,
) -> Result<Vec<(&'static str, bool)>, ModelError> {
    let wn = inst.extent("W")?;
    let hn = inst.extent("H")?;
    let tn = inst.extent("T")?;
    let bmin = inst.extent("BMin")?;
    let bmax = inst.extent("BMax")?;
    let rmin = inst.extent("RMin")?;
    let avail = inst.array("availableHours", &[wn, hn])?;
    let skills = inst.array("workerTaskSkills", &[wn, tn])?;
    let task_hour: Vec<usize> = inst.array("taskHour", &[tn])?.into_iter().map(|h| h as usize).collect();

    let x = view("workerHours")?;
    let s = view("startBlock")?;
    let e = view("endBlock")?;
    let tasks = if tn > 0 {
        Some((view("taskAssigned")?, view("unassignedTask")?))
    } else {
        None
    };

    let mut availability = true;
    let mut skill = true;
    let mut task_hour_ok = true;
    let mut no_multi = true;
    let mut starts = true;
    let mut start_boundary = true;
    let mut ends = true;
    let mut end_boundary = true;
    let mut min_block = true;
    let mut max_block = true;
    let mut rest = true;
    let mut unassigned = true;

    for w in 0..wn {
        for h in 0..hn {
            if x.on(&[w, h]) && avail[w * hn + h] == 0 {
                availability = false;
            }
            let worked = x.on(&[w, h]);
            if h > 0 && worked && !x.on(&[w, h - 1]) && !s.on(&[w, h]) {
                starts = false;
            }
            if h + 1 < hn && worked && !x.on(&[w, h + 1]) && !e.on(&[w, h]) {
                ends = false;
            }
            if s.on(&[w, h]) {
                if h + bmin >= hn {
                    if bmin > 0 {
                        min_block = false;
                    }
                } else if (h..h + bmin).any(|k| !x.on(&[w, k])) {
                    min_block = false;
                }
                // A window reaching past the horizon always contains rest.
                let reaches_end = h + bmax >= hn;
                if !reaches_end && (h..=h + bmax).all(|k| x.on(&[w, k])) {
                    max_block = false;
                }
            }
            if e.on(&[w, h]) && (h + 1..hn.min(h + rmin + 1)).any(|k| x.on(&[w, k])) {
                rest = false;
            }
        }
        if s.at(&[w, 0]) != x.at(&[w, 0]) {
            start_boundary = false;
        }
        if e.at(&[w, hn - 1]) != x.at(&[w, hn - 1]) {
            end_boundary = false;
        }
        if let Some((y, _)) = &tasks {
            for t in 0..tn {
                if y.on(&[w, t]) {
                    if skills[w * tn + t] == 0 {
                        skill = false;
                    }
                    if !x.on(&[w, task_hour[t]]) {
                        task_hour_ok = false;
                    }
                }
            }
            for h in 0..hn {
                let busy = (0..tn).filter(|&t| task_hour[t] == h && y.on(&[w, t])).count();
                if busy > 1 {
                    no_multi = false;
                }
            }
        }
    }
    if let Some((y, u)) = &tasks {
        for t in 0..tn {
            let covered = (0..wn).any(|w| y.on(&[w, t]));
            if !covered && !u.on(&[t]) {
                unassigned = false;
            }
        }
    }

    Ok(vec![
        ("Availability", availability),
        ("Skill", skill),
        ("TaskHour", task_hour_ok),
        ("NoMultiTask", no_multi),
        ("StartBlock", starts),
        ("StartBlockBoundary", start_boundary),
        ("EndBlock", ends),
        ("EndBlockBoundary", end_boundary),
        ("MinBlockLength", min_block),
        ("MaxBlockLength", max_block),
        ("MinRest", rest),
        ("UnassignedTask", unassigned),
    ])
}

/// Alternate reading of the maximum block rule: a block starting at `h` must
/// hit an `endBlock` marker within `h..h+BMax` (clipped to the horizon).
pub fn gsp_max_block_by_end_markers<S: Scalar>(
    instance: &Instance,
    model: &ModelIr<S>,
    assignment: &Assignment<S>,
) -> Result<bool, ModelError> {
    let wn = instance.extent("W")?;
    let hn = instance.extent("H")?;
    let bmax = instance.extent("BMax")?;
    let s = Grid::new(assignment.family(model, "startBlock")?)?;
    let e = Grid::new(assignment.family(model, "endBlock")?)?;
    for w in 0..wn {
        for h in 0..hn {
            if s.on(&[w, h]) && !(h..hn.min(h + bmax)).any(|k| e.on(&[w, k])) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn nsp(
    inst: &Instance,
    view: impl Fn(&str) -> Result<Grid, ModelError>,
) -> Result<Vec<(&'static str, bool)>, ModelError> {
    let nn = inst.extent("N")?;
    let dn = inst.extent("D")?;
    let sn = inst.extent("S")?;
    let tn = inst.extent("T")?;
    let avail = inst.array("availableShifts", &[nn, dn, sn])?;
    let slot: Vec<usize> = inst.array("shiftSlot", &[sn])?.into_iter().map(|t| t as usize).collect();
    let hours = inst.array("shiftHours", &[sn])?;
    let demand = inst.array("demandSlot", &[dn, tn])?;
    let rest = inst.array("restDays", &[nn, dn])?;
    let min_hours = inst.scalar("MinHours")?;
    let max_hours = inst.scalar("MaxHours")?;
    let max_days = inst.scalar("MaxWorkingDays")?;

    let x = view("nurseDayShift")?;
    let y = view("nurseDaySlot")?;
    let surplus = view("surplus")?;
    let shortfall = view("shortfall")?;

    let mut availability = true;
    let mut one_shift = true;
    let mut link = true;
    let mut demand_ok = true;
    let mut min_ok = true;
    let mut max_ok = true;
    let mut rest_ok = true;
    let mut weekly_ok = true;
    let mut nd_am = true;

    for n in 0..nn {
        let mut worked_hours = 0;
        for d in 0..dn {
            let mut shifts_today = 0;
            for s in 0..sn {
                if x.on(&[n, d, s]) {
                    shifts_today += 1;
                    worked_hours += hours[s];
                    if avail[(n * dn + d) * sn + s] == 0 {
                        availability = false;
                    }
                    if rest[n * dn + d] == 1 {
                        rest_ok = false;
                    }
                }
            }
            if shifts_today > 1 {
                one_shift = false;
            }
            for t in 0..tn {
                let in_slot = (0..sn).filter(|&s| slot[s] == t && x.on(&[n, d, s])).count() as i64;
                if y.at(&[n, d, t]) != in_slot {
                    link = false;
                }
            }
            if d + 1 < dn && y.on(&[n, d, 2]) && y.on(&[n, d + 1, 0]) {
                nd_am = false;
            }
        }
        if worked_hours < min_hours {
            min_ok = false;
        }
        if worked_hours > max_hours {
            max_ok = false;
        }
        for week in 0..dn / 7 {
            let mut days = 0;
            for d in week * 7..week * 7 + 7 {
                days += (0..sn).filter(|&s| x.on(&[n, d, s])).count() as i64;
            }
            if days > max_days {
                weekly_ok = false;
            }
        }
    }
    for d in 0..dn {
        for t in 0..tn {
            let staffed: i64 = (0..nn).map(|n| y.at(&[n, d, t])).sum();
            let target = demand[d * tn + t] + surplus.at(&[d, t]) - shortfall.at(&[d, t]);
            if staffed != target {
                demand_ok = false;
            }
        }
    }

    Ok(vec![
        ("Availability", availability),
        ("MaxOneShiftPerDay", one_shift),
        ("ShiftSlotLink", link),
        ("Demand", demand_ok),
        ("MinHours", min_ok),
        ("MaxHours", max_ok),
        ("RestDays", rest_ok),
        ("MaxWorkingDays", weekly_ok),
        ("NoNDAM", nd_am),
    ])
}

fn static_nurse(
    inst: &Instance,
    view: impl Fn(&str) -> Result<Grid, ModelError>,
) -> Result<Vec<(&'static str, bool)>, ModelError> {
    let nn = inst.extent("N")?;
    let dn = inst.extent("D")?;
    let sn = inst.extent("S")?;
    let m = inst.scalar("M")?;
    let x = view("X")?;

    let coverage = (0..dn).all(|d| (0..sn).all(|s| (0..nn).filter(|&n| x.on(&[n, d, s])).count() == 1));
    let per_day = (0..nn).all(|n| (0..dn).all(|d| (0..sn).filter(|&s| x.on(&[n, d, s])).count() <= 1));
    let min_shifts = (0..nn).all(|n| {
        let total: i64 = (0..dn).flat_map(|d| (0..sn).map(move |s| (d, s))).map(|(d, s)| x.at(&[n, d, s])).sum();
        total >= m
    });
    Ok(vec![
        ("ShiftCoverage", coverage),
        ("OneShiftPerDay", per_day),
        ("MinShifts", min_shifts),
    ])
}
