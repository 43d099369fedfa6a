#![allow(dead_code)]

use dynsched_core::{Instance, Model, ProblemKind, Schedule, Value};
use rand::Rng;
use std::collections::BTreeMap;

pub fn data(pairs: Vec<(&str, Value)>) -> BTreeMap<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

pub fn int(v: i64) -> Value {
    Value::Int(v)
}

pub fn arr(dims: &[usize], values: &[i64]) -> Value {
    Value::from_flat(dims, values)
}

pub fn filled(dims: &[usize], v: i64) -> Value {
    let n: usize = dims.iter().product();
    arr(dims, &vec![v; n])
}

pub fn random_bits<R: Rng>(rng: &mut R, n: usize, p: f64) -> Vec<i64> {
    (0..n).map(|_| i64::from(rng.gen_bool(p))).collect()
}

pub fn gsp<R: Rng>(rng: &mut R, w: usize, h: usize, t: usize) -> Instance {
    let avail = random_bits(rng, w * h, 0.8);
    let skills = random_bits(rng, w * t, 0.7);
    let mut task_hour: Vec<i64> = (0..t).map(|_| rng.gen_range(0..h as i64)).collect();
    // Two tasks sharing an hour keep the no-multitasking rule non-vacuous.
    if t >= 2 {
        task_hour[1] = task_hour[0];
    }
    Instance::new(
        ProblemKind::Gsp,
        data(vec![
            ("W", int(w as i64)),
            ("H", int(h as i64)),
            ("T", int(t as i64)),
            ("BMin", int(2)),
            ("BMax", int(4)),
            ("RMin", int(1)),
            ("availableHours", arr(&[w, h], &avail)),
            ("workerTaskSkills", arr(&[w, t], &skills)),
            ("taskHour", arr(&[t], &task_hour)),
        ]),
    )
}

pub fn nsp<R: Rng>(rng: &mut R, n: usize, d: usize, s: usize) -> Instance {
    let avail = random_bits(rng, n * d * s, 0.85);
    let slot: Vec<i64> = (0..s).map(|i| (i % 3) as i64).collect();
    let hours: Vec<i64> = (0..s).map(|i| if i < 3 { 8 } else { 4 }).collect();
    let demand: Vec<i64> = (0..d * 3).map(|_| rng.gen_range(0..2)).collect();
    let rest = random_bits(rng, n * d, 0.15);
    Instance::new(
        ProblemKind::Nsp,
        data(vec![
            ("N", int(n as i64)),
            ("D", int(d as i64)),
            ("S", int(s as i64)),
            ("T", int(3)),
            ("availableShifts", arr(&[n, d, s], &avail)),
            ("shiftSlot", arr(&[s], &slot)),
            ("shiftHours", arr(&[s], &hours)),
            ("demandSlot", arr(&[d, 3], &demand)),
            ("restDays", arr(&[n, d], &rest)),
            ("MinHours", int(16)),
            ("MaxHours", int(40)),
            ("MaxWorkingDays", int(5)),
        ]),
    )
}

pub fn static_nurse(n: usize, d: usize, s: usize, m: i64, prefs: &[i64]) -> Instance {
    Instance::new(
        ProblemKind::StaticNurse,
        data(vec![
            ("N", int(n as i64)),
            ("D", int(d as i64)),
            ("S", int(s as i64)),
            ("M", int(m)),
            ("P", arr(&[n, d, s], prefs)),
        ]),
    )
}

/// Random assignment that stays close enough to feasibility for every group
/// verdict to come out both ways over a batch. Block markers and slot links
/// are derived from the hour/shift grid with probability one half and left
/// random otherwise.
pub fn random_assignment<R: Rng>(rng: &mut R, inst: &Instance, model: &Model) -> Schedule {
    let p = [0.0, 0.03, 0.1, 0.3, 0.5, 0.8][rng.gen_range(0..6)];
    let mut a = Schedule::zeros(model.num_vars());
    for fam in &model.families {
        let r = model.family(&fam.name).unwrap();
        let (lo, hi) = fam.bounds();
        for id in r.ids() {
            let v = if fam.is_boolean() {
                i64::from(rng.gen_bool(p))
            } else {
                rng.gen_range(lo..=hi)
            };
            a.set(id, v);
        }
    }
    if rng.gen_bool(0.5) {
        derive_auxiliaries(rng, inst, model, &mut a);
    }
    a
}

fn derive_auxiliaries<R: Rng>(rng: &mut R, inst: &Instance, model: &Model, a: &mut Schedule) {
    match inst.kind {
        ProblemKind::Gsp => derive_blocks(inst, model, a),
        ProblemKind::Nsp => {
            let (n, d, s) = (inst.extent("N").unwrap(), inst.extent("D").unwrap(), inst.extent("S").unwrap());
            let slot = inst.array("shiftSlot", &[s]).unwrap();
            let demand = inst.array("demandSlot", &[d, 3]).unwrap();
            for ni in 0..n {
                for di in 0..d {
                    for t in 0..3 {
                        let on: i64 = (0..s)
                            .filter(|&si| slot[si] == t as i64)
                            .map(|si| a.get(model.var("nurseDayShift", &[ni, di, si]).unwrap()))
                            .sum();
                        a.set(model.var("nurseDaySlot", &[ni, di, t]).unwrap(), on.min(1));
                    }
                }
            }
            if rng.gen_bool(0.7) {
                for di in 0..d {
                    for t in 0..3 {
                        let staffed: i64 = (0..n)
                            .map(|ni| a.get(model.var("nurseDaySlot", &[ni, di, t]).unwrap()))
                            .sum();
                        let gap = staffed - demand[di * 3 + t];
                        a.set(model.var("surplus", &[di, t]).unwrap(), gap.max(0));
                        a.set(model.var("shortfall", &[di, t]).unwrap(), (-gap).max(0));
                    }
                }
            }
        }
        ProblemKind::StaticNurse => {}
    }
}

/// Sets startBlock/endBlock to exactly the block boundaries of workerHours.
pub fn derive_blocks(inst: &Instance, model: &Model, a: &mut Schedule) {
    let (w, h) = (inst.extent("W").unwrap(), inst.extent("H").unwrap());
    for wi in 0..w {
        let x = |a: &Schedule, hi: usize| a.get(model.var("workerHours", &[wi, hi]).unwrap());
        for hi in 0..h {
            let cur = x(a, hi);
            let start = cur == 1 && (hi == 0 || x(a, hi - 1) == 0);
            let end = cur == 1 && (hi + 1 == h || x(a, hi + 1) == 0);
            a.set(model.var("startBlock", &[wi, hi]).unwrap(), i64::from(start));
            a.set(model.var("endBlock", &[wi, hi]).unwrap(), i64::from(end));
        }
    }
}
