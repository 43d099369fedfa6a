//! Planning sessions: a base instance plus the patches accepted on top of
//! it, persisted as an append-only event log.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use dynsched_agents::{PatchResult, TranscriptEntry};
use dynsched_core::{apply_patch, build_model, evaluate_assignment, Cells, Instance, Model, Patch, ProblemKind, Schedule, Value};
use dynsched_dsl::{compile, Grounded};
use dynsched_solver::{SolveLimits, SolveReport};
use serde::{Deserialize, Serialize};

use crate::diff::CellChange;
use crate::error::{Result, ServiceError};

pub type Report = SolveReport<i64>;

/// How the text of a step was given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// A request in everyday language, turned into a patch by the agents.
    Nl,
    /// Patch text written directly.
    Dsl,
}

/// One constraint change and what solving it gave.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub mode: Mode,
    pub text: String,
    pub t_perturb: Option<i64>,
    /// Data keys this step added to the instance, injected keys included.
    pub data: BTreeMap<String, Value>,
    pub patch_text: String,
    pub grounded: Patch,
    /// Agent output when `mode` is `nl`.
    pub result: Option<PatchResult>,
    pub limits: SolveLimits,
    pub report: Report,
    pub diff: Vec<CellChange>,
}

impl Step {
    pub fn attempts(&self) -> usize {
        self.result.as_ref().map_or(1, |r| r.attempts)
    }
}

/// Log entry. A session file holds one per line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Created { id: String, instance: Instance, at: u64 },
    Solved { limits: SolveLimits, report: Report, at: u64 },
    Accepted { step: Box<Step>, at: u64 },
}

/// A step computed but not yet accepted.
#[derive(Debug, Clone)]
pub struct Pending {
    pub step: Step,
    pub model: Model,
    pub instance: Instance,
}

/// Latest agent transcript, kept whether or not the run succeeded.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub request: String,
    pub plan: Option<dynsched_agents::PlanSections>,
    pub patch_text: Option<String>,
    pub attempts: usize,
    pub error: Option<String>,
    pub transcript: Vec<TranscriptEntry>,
}

#[derive(Debug)]
pub struct Session {
    pub id: String,
    pub kind: ProblemKind,
    pub base: Instance,
    /// Base data plus the keys added by accepted steps.
    pub instance: Instance,
    /// Base model with every accepted patch applied, in order.
    pub model: Model,
    pub history: Vec<Step>,
    pub schedule: Option<Schedule>,
    pub report: Option<Report>,
    pub pending: Option<Pending>,
    pub trace: Option<Trace>,
    pub created: u64,
    pub updated: u64,
    log: Option<PathBuf>,
}

pub fn now_millis() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

impl Session {
    /// New session; writes its first log entry when `log` is given.
    pub fn create(id: String, instance: Instance, log: Option<PathBuf>) -> Result<Self> {
        let model: Model = build_model(&instance)?;
        let at = now_millis();
        let session = Session {
            kind: instance.kind,
            base: instance.clone(),
            instance: instance.clone(),
            model,
            history: Vec::new(),
            schedule: None,
            report: None,
            pending: None,
            trace: None,
            created: at,
            updated: at,
            log,
            id: id.clone(),
        };
        session.record(&Event::Created { id, instance, at })?;
        Ok(session)
    }

    fn record(&self, event: &Event) -> Result<()> {
        let Some(path) = &self.log else { return Ok(()) };
        let mut line = serde_json::to_string(event).map_err(|e| ServiceError::Io(e.to_string()))?;
        line.push('\n');
        let mut f = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
        f.write_all(line.as_bytes())?;
        f.flush()?;
        Ok(())
    }

    pub fn family(&self) -> &'static str {
        self.kind.schedule_family()
    }

    /// Schedule cells of the current solution.
    pub fn cells(&self) -> Result<Cells> {
        let s = self.schedule.as_ref().ok_or(ServiceError::NoSchedule)?;
        Ok(s.family(&self.model, self.family())?)
    }

    /// Records a solve of the current model. Only reports with a solution
    /// replace the schedule.
    pub fn set_solved(&mut self, limits: SolveLimits, report: Report) -> Result<()> {
        let Some(best) = &report.best else { return Ok(()) };
        if !evaluate_assignment(&self.model, best)?.feasible {
            return Err(ServiceError::BadRequest("solver returned an infeasible assignment".into()));
        }
        let at = now_millis();
        self.record(&Event::Solved {
            limits,
            report: report.clone(),
            at,
        })?;
        self.schedule = Some(best.clone());
        self.report = Some(report);
        self.updated = at;
        Ok(())
    }

    /// Moves the pending step into the history. Steps whose model has no
    /// solution are refused and stay pending.
    pub fn accept(&mut self) -> Result<&Step> {
        let pending = self.pending.as_ref().ok_or(ServiceError::NoPending)?;
        let Some(best) = &pending.step.report.best else {
            return Err(ServiceError::NotAccepted(format!(
                "the patched model has no solution ({})",
                pending.step.report.status.as_str()
            )));
        };
        if !evaluate_assignment(&pending.model, best)?.feasible {
            return Err(ServiceError::NotAccepted("the new schedule violates the patched model".into()));
        }
        let at = now_millis();
        self.record(&Event::Accepted {
            step: Box::new(pending.step.clone()),
            at,
        })?;
        let pending = self.pending.take().expect("checked above");
        self.schedule = pending.step.report.best.clone();
        self.report = Some(pending.step.report.clone());
        self.model = pending.model;
        self.instance = pending.instance;
        self.history.push(pending.step);
        self.updated = at;
        Ok(self.history.last().expect("just pushed"))
    }

    pub fn discard(&mut self) -> Result<()> {
        self.pending.take().map(|_| ()).ok_or(ServiceError::NoPending)
    }

    /// Rebuilds a session from its log. Every accepted patch is compiled
    /// again from its text and must ground to the recorded rows.
    pub fn replay(path: &Path) -> Result<Self> {
        let corrupt = |reason: String| ServiceError::Corrupt {
            path: path.display().to_string(),
            reason,
        };
        let text = std::fs::read_to_string(path)?;
        let mut session: Option<Session> = None;
        for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let event: Event = serde_json::from_str(line).map_err(|e| corrupt(format!("line {}: {e}", n + 1)))?;
            match (event, session.as_mut()) {
                (Event::Created { id, instance, at }, None) => {
                    let mut s = Session::create(id, instance, None)?;
                    s.created = at;
                    s.updated = at;
                    session = Some(s);
                }
                (Event::Solved { report, at, .. }, Some(s)) => {
                    let best = report.best.as_ref().ok_or_else(|| corrupt("solve without a solution".into()))?;
                    if !evaluate_assignment(&s.model, best)?.feasible {
                        return Err(corrupt(format!("line {}: schedule violates the model", n + 1)));
                    }
                    s.schedule = Some(best.clone());
                    s.report = Some(report);
                    s.updated = at;
                }
                (Event::Accepted { step, at }, Some(s)) => {
                    let instance = with_data(&s.instance, &step.data);
                    let grounded: Grounded<i64> = compile(&step.patch_text, &s.model, &instance)
                        .map_err(|e| corrupt(format!("line {}: {}", n + 1, e.render(&step.patch_text))))?;
                    if grounded.patch != step.grounded {
                        return Err(corrupt(format!("line {}: patch grounds differently", n + 1)));
                    }
                    s.model = apply_patch(&s.model, &grounded.patch)?;
                    s.instance = instance;
                    s.schedule = step.report.best.clone();
                    s.report = Some(step.report.clone());
                    s.history.push(*step);
                    s.updated = at;
                }
                (_, _) => return Err(corrupt(format!("line {}: event out of order", n + 1))),
            }
        }
        let mut s = session.ok_or_else(|| corrupt("empty log".into()))?;
        s.log = Some(path.to_path_buf());
        Ok(s)
    }
}

/// `base` with `data` merged in, later keys winning.
pub fn with_data(base: &Instance, data: &BTreeMap<String, Value>) -> Instance {
    let mut inst = base.clone();
    inst.data.extend(data.iter().map(|(k, v)| (k.clone(), v.clone())));
    inst
}
