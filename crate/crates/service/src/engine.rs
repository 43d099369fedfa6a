//! Session operations shared by the HTTP API and the command line.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use dynsched_agents::{paraphrase, run_pipeline, AgentContext, Failure, LlmBackend, Paraphrase, PatchResult, DEFAULT_MAX_ATTEMPTS};
use dynsched_core::{apply_patch, Cells, Instance, ProblemKind, Value};
use dynsched_dsl::compile;
use dynsched_eval::{default_eval_limits, run_testset, EvalOptions, EvalRun, TestSet};
use dynsched_rag::TfIdfStore;
use dynsched_solver::{solve, SolveLimits};
use parking_lot::{Mutex, RwLock};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diff::{diff_schedules, CellChange};
use crate::error::{Result, ServiceError};
use crate::export::ScheduleGrid;
use crate::session::{with_data, Mode, Pending, Report, Session, Step, Trace};

/// Instance key holding the schedule a perturbation bound refers to.
pub const ORIG_SCHEDULE_KEY: &str = "origSchedule";
/// Instance key holding the perturbation bound.
pub const T_PERTURB_KEY: &str = "T_perturb";

#[derive(Debug, Clone)]
pub struct EngineOptions {
    /// Where session logs live; `None` keeps sessions in memory only.
    pub sessions_dir: Option<PathBuf>,
    /// Root for test sets and fixtures named without a path.
    pub data_dir: PathBuf,
    pub limits: SolveLimits,
    pub max_attempts: usize,
    /// Seed for session ids; `None` draws one from the clock.
    pub seed: Option<u64>,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            sessions_dir: None,
            data_dir: PathBuf::from("data"),
            limits: SolveLimits::default(),
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionInfo {
    pub id: String,
    pub kind: ProblemKind,
    pub variables: usize,
    pub groups: Vec<String>,
    pub has_schedule: bool,
    pub steps: usize,
    pub pending: bool,
    pub created: u64,
    pub updated: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstrainRequest {
    pub mode: Mode,
    pub text: String,
    #[serde(default)]
    pub t_perturb: Option<i64>,
    /// Extra instance data the request refers to, such as the nurse or
    /// days it names.
    #[serde(default)]
    pub data: BTreeMap<String, Value>,
    #[serde(default)]
    pub limits: Option<SolveLimits>,
}

impl ConstrainRequest {
    pub fn nl(text: impl Into<String>) -> Self {
        ConstrainRequest {
            mode: Mode::Nl,
            text: text.into(),
            t_perturb: None,
            data: BTreeMap::new(),
            limits: None,
        }
    }

    pub fn dsl(text: impl Into<String>) -> Self {
        ConstrainRequest {
            mode: Mode::Dsl,
            ..ConstrainRequest::nl(text)
        }
    }

    pub fn with_t_perturb(mut self, t: i64) -> Self {
        self.t_perturb = Some(t);
        self
    }

    pub fn with_scalar(mut self, key: &str, v: i64) -> Self {
        self.data.insert(key.to_string(), Value::Int(v));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstrainResponse {
    pub patch_text: String,
    pub result: Option<PatchResult>,
    pub attempts: usize,
    pub report: Report,
    pub diff: Vec<CellChange>,
    pub hamming: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffSource {
    Pending,
    LastStep,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffView {
    pub source: DiffSource,
    pub changes: Vec<CellChange>,
    pub hamming: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleView {
    pub grid: ScheduleGrid,
    pub cells: Cells,
    pub report: Report,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub index: usize,
    pub mode: Mode,
    pub text: String,
    pub t_perturb: Option<i64>,
    pub patch_text: String,
    pub attempts: usize,
    pub report: Report,
    pub changed_cells: usize,
}

pub struct Engine {
    sessions: RwLock<BTreeMap<String, Arc<Mutex<Session>>>>,
    ids: Mutex<ChaCha8Rng>,
    backend: Box<dyn LlmBackend>,
    rag: TfIdfStore,
    opts: EngineOptions,
}

impl Engine {
    /// Engine over `opts.sessions_dir`, replaying every session log found
    /// there. Logs that fail to replay are skipped with a warning.
    pub fn open(backend: Box<dyn LlmBackend>, opts: EngineOptions) -> Result<Self> {
        let seed = opts.seed.unwrap_or_else(crate::session::now_millis);
        let engine = Engine {
            sessions: RwLock::new(BTreeMap::new()),
            ids: Mutex::new(ChaCha8Rng::seed_from_u64(seed)),
            backend,
            rag: dynsched_rag::seeded_store(),
            opts,
        };
        if let Some(dir) = &engine.opts.sessions_dir {
            std::fs::create_dir_all(dir)?;
            let mut logs: Vec<PathBuf> = std::fs::read_dir(dir)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|e| e == "jsonl"))
                .collect();
            logs.sort();
            let mut sessions = engine.sessions.write();
            for path in logs {
                match Session::replay(&path) {
                    Ok(s) => {
                        sessions.insert(s.id.clone(), Arc::new(Mutex::new(s)));
                    }
                    Err(e) => tracing::warn!("skipping session log: {e}"),
                }
            }
        }
        Ok(engine)
    }

    pub fn options(&self) -> &EngineOptions {
        &self.opts
    }

    pub fn backend_name(&self) -> &str {
        self.backend.name()
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>> {
        self.sessions
            .read()
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::NotFound(id.to_string()))
    }

    fn info(s: &Session) -> SessionInfo {
        SessionInfo {
            id: s.id.clone(),
            kind: s.kind,
            variables: s.model.num_vars(),
            groups: s.model.groups.iter().map(|g| g.name.clone()).collect(),
            has_schedule: s.schedule.is_some(),
            steps: s.history.len(),
            pending: s.pending.is_some(),
            created: s.created,
            updated: s.updated,
        }
    }

    pub fn list(&self) -> Vec<SessionInfo> {
        self.sessions.read().values().map(|s| Self::info(&s.lock())).collect()
    }

    pub fn create_session(&self, instance: Instance) -> Result<SessionInfo> {
        let mut sessions = self.sessions.write();
        let id = loop {
            let id = format!("{:016x}", self.ids.lock().gen::<u64>());
            if !sessions.contains_key(&id) {
                break id;
            }
        };
        let log = self.opts.sessions_dir.as_ref().map(|d| d.join(format!("{id}.jsonl")));
        let session = Session::create(id.clone(), instance, log)?;
        let info = Self::info(&session);
        sessions.insert(id, Arc::new(Mutex::new(session)));
        Ok(info)
    }

    pub fn session_info(&self, id: &str) -> Result<SessionInfo> {
        Ok(Self::info(&self.session(id)?.lock()))
    }

    /// Solves the current model; a solution becomes the current schedule.
    pub fn solve(&self, id: &str, limits: Option<SolveLimits>) -> Result<Report> {
        let session = self.session(id)?;
        let mut s = session.lock();
        let limits = limits.unwrap_or(self.opts.limits);
        let report = solve(&s.model, &limits);
        s.set_solved(limits, report.clone())?;
        Ok(report)
    }

    /// Turns a request into a patch, applies it to a copy of the current
    /// model and solves. The result stays pending until accepted.
    pub fn constrain(&self, id: &str, req: &ConstrainRequest) -> Result<ConstrainResponse> {
        let session = self.session(id)?;
        let mut s = session.lock();
        let mut data = req.data.clone();
        if let Some(t) = req.t_perturb {
            if t < 0 {
                return Err(ServiceError::BadRequest("t_perturb must be non-negative".into()));
            }
            let cells = s.cells()?;
            data.insert(ORIG_SCHEDULE_KEY.into(), Value::from_flat(&cells.dims, &cells.to_i64()));
            data.insert(T_PERTURB_KEY.into(), Value::Int(t));
        }
        let instance = with_data(&s.instance, &data);

        let (patch_text, grounded, result) = match req.mode {
            Mode::Nl => {
                let ctx = AgentContext::new(&s.model, &instance, &self.rag).with_max_attempts(self.opts.max_attempts);
                match run_pipeline(&ctx, &req.text, &*self.backend) {
                    Ok(r) => {
                        s.trace = Some(Trace {
                            request: req.text.clone(),
                            plan: Some(r.plan.clone()),
                            patch_text: Some(r.text.clone()),
                            attempts: r.attempts,
                            error: None,
                            transcript: r.transcript.clone(),
                        });
                        (r.text.clone(), r.grounded.clone(), Some(r))
                    }
                    Err(e) => {
                        let patch_text = match &e.failure {
                            Failure::FixExhausted { text, .. } => Some(text.clone()),
                            _ => None,
                        };
                        s.trace = Some(Trace {
                            request: req.text.clone(),
                            plan: e.plan.clone(),
                            patch_text,
                            attempts: e.attempts,
                            error: Some(e.to_string()),
                            transcript: e.transcript.clone(),
                        });
                        return Err(e.into());
                    }
                }
            }
            Mode::Dsl => {
                let compiled = compile::<i64>(&req.text, &s.model, &instance);
                s.trace = Some(Trace {
                    request: req.text.clone(),
                    plan: None,
                    patch_text: Some(req.text.clone()),
                    attempts: 1,
                    error: compiled.as_ref().err().map(|e| e.render(&req.text)),
                    transcript: Vec::new(),
                });
                let g = compiled.map_err(|e| ServiceError::dsl(e, &req.text))?;
                (req.text.clone(), g.patch, None)
            }
        };

        let model = apply_patch(&s.model, &grounded)?;
        let limits = req.limits.unwrap_or(self.opts.limits);
        let report = solve(&model, &limits);
        let family = s.family();
        let diff = match (&s.schedule, &report.best) {
            (Some(old), Some(new)) => diff_schedules(&old.family(&s.model, family)?, &new.family(&model, family)?)?,
            _ => Vec::new(),
        };
        let step = Step {
            mode: req.mode,
            text: req.text.clone(),
            t_perturb: req.t_perturb,
            data,
            patch_text: patch_text.clone(),
            grounded,
            result,
            limits,
            report,
            diff,
        };
        let response = ConstrainResponse {
            patch_text,
            attempts: step.attempts(),
            result: step.result.clone(),
            report: step.report.clone(),
            hamming: step.diff.len(),
            diff: step.diff.clone(),
        };
        s.pending = Some(Pending { step, model, instance });
        Ok(response)
    }

    pub fn accept(&self, id: &str) -> Result<HistoryEntry> {
        let session = self.session(id)?;
        let mut s = session.lock();
        let index = s.history.len();
        let step = s.accept()?;
        Ok(entry(index, step))
    }

    pub fn discard(&self, id: &str) -> Result<()> {
        self.session(id)?.lock().discard()
    }

    pub fn schedule(&self, id: &str) -> Result<ScheduleView> {
        let session = self.session(id)?;
        let s = session.lock();
        let cells = s.cells()?;
        let report = s.report.clone().ok_or(ServiceError::NoSchedule)?;
        Ok(ScheduleView {
            grid: ScheduleGrid::new(s.kind, &cells, report.status, report.objective),
            cells,
            report: report.without_timing(),
        })
    }

    /// Cells changed by the pending step, or by the last accepted one when
    /// nothing is pending.
    pub fn diff(&self, id: &str) -> Result<DiffView> {
        let session = self.session(id)?;
        let s = session.lock();
        let (source, changes) = match (&s.pending, s.history.last()) {
            (Some(p), _) => (DiffSource::Pending, p.step.diff.clone()),
            (None, Some(step)) => (DiffSource::LastStep, step.diff.clone()),
            (None, None) => (DiffSource::None, Vec::new()),
        };
        Ok(DiffView {
            source,
            hamming: changes.len(),
            changes,
        })
    }

    pub fn trace(&self, id: &str) -> Result<Option<Trace>> {
        Ok(self.session(id)?.lock().trace.clone())
    }

    pub fn history(&self, id: &str) -> Result<Vec<HistoryEntry>> {
        let session = self.session(id)?;
        let s = session.lock();
        Ok(s.history.iter().enumerate().map(|(i, step)| entry(i, step)).collect())
    }

    /// Current model of a session, for inspection and replay checks.
    pub fn with_session<T>(&self, id: &str, f: impl FnOnce(&Session) -> T) -> Result<T> {
        Ok(f(&self.session(id)?.lock()))
    }

    /// Digest of everything a session exposes, to check that reads leave
    /// it untouched.
    pub fn state_digest(&self, id: &str) -> Result<u64> {
        let session = self.session(id)?;
        let s = session.lock();
        let snapshot = serde_json::json!({
            "instance": s.instance,
            "history": s.history,
            "schedule": s.schedule,
            "report": s.report,
            "pending": s.pending.as_ref().map(|p| &p.step),
            "trace": s.trace,
            "updated": s.updated,
        });
        let mut h = DefaultHasher::new();
        s.model.hash(&mut h);
        snapshot.to_string().hash(&mut h);
        Ok(h.finish())
    }

    fn resolve(&self, name: &str, folder: &str) -> PathBuf {
        let direct = Path::new(name);
        if direct.exists() {
            return direct.to_path_buf();
        }
        self.opts.data_dir.join(folder).join(format!("{name}.json"))
    }

    pub fn load_testset(&self, testset: &str) -> Result<TestSet> {
        TestSet::load(self.resolve(testset, "testsets")).map_err(|e| ServiceError::BadRequest(e.to_string()))
    }

    /// Runs a test set against a replay fixture given by path or by name
    /// under the data directory.
    pub fn eval_run(&self, testset: &str, fixture: &str, threads: Option<usize>) -> Result<EvalRun> {
        let set = self.load_testset(testset)?;
        let backend = dynsched_agents::FixtureBackend::load(self.resolve(fixture, "fixtures"))?;
        let opts = EvalOptions {
            limits: default_eval_limits(),
            max_attempts: self.opts.max_attempts,
            threads,
        };
        run_testset(&set.cases, &backend, &self.rag, &opts).map_err(|e| ServiceError::BadRequest(e.to_string()))
    }

    pub fn paraphrase(&self, text: &str, n: usize) -> Result<Vec<Paraphrase>> {
        Ok(paraphrase(text, n, &*self.backend)?)
    }
}

fn entry(index: usize, step: &Step) -> HistoryEntry {
    HistoryEntry {
        index,
        mode: step.mode,
        text: step.text.clone(),
        t_perturb: step.t_perturb,
        patch_text: step.patch_text.clone(),
        attempts: step.attempts(),
        report: step.report.without_timing(),
        changed_cells: step.diff.len(),
    }
}
