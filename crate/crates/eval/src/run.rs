//! Running a test set and tabulating outcomes.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use dynsched_agents::{run_pipeline, AgentContext, LlmBackend, TranscriptEntry, DEFAULT_MAX_ATTEMPTS};
use dynsched_core::{apply_patch, build_model, Int, Model, ProblemKind};
use dynsched_dsl::{compile, parse};
use dynsched_rag::TfIdfStore;
use dynsched_solver::{solve, Bound, SolveLimits, SolveReport, SolveStatus};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hallucination::detect_hallucinated_params;
use crate::outcome::{classify_outcome, Generated, Outcome};
use crate::testset::TestCase;

/// Search budget of every solve in a run. The node limit keeps runs
/// reproducible; the time limit is only a safety net.
pub fn default_eval_limits() -> SolveLimits {
    SolveLimits::seconds(60.0).with_nodes(2_000_000)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts(pub [usize; 5]);

impl Counts {
    pub fn get(&self, o: Outcome) -> usize {
        self.0[o.index()]
    }

    pub fn add(&mut self, o: Outcome) {
        self.0[o.index()] += 1;
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn tuple(&self) -> (usize, usize, usize, usize, usize) {
        let c = self.0;
        (c[0], c[1], c[2], c[3], c[4])
    }
}

/// Outcome counts per problem kind.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ResultsTable {
    pub rows: BTreeMap<ProblemKind, Counts>,
}

impl ResultsTable {
    pub fn from_records(records: &[CaseRecord]) -> Self {
        let mut t = ResultsTable::default();
        for r in records {
            t.rows.entry(r.kind).or_default().add(r.outcome);
        }
        t
    }

    pub fn row(&self, kind: ProblemKind) -> Counts {
        self.rows.get(&kind).copied().unwrap_or_default()
    }

    pub fn totals(&self) -> Counts {
        let mut c = Counts::default();
        for row in self.rows.values() {
            for (i, v) in row.0.iter().enumerate() {
                c.0[i] += v;
            }
        }
        c
    }

    /// Fixed-width text table, one row per kind plus a total row.
    pub fn render(&self) -> String {
        let mut s = format!("{:<8}", "Problem");
        for o in Outcome::ALL {
            let _ = write!(s, " {:>16}", o.as_str());
        }
        let _ = writeln!(s, " {:>6}", "Cases");
        let mut line = |name: &str, c: &Counts| {
            let _ = write!(s, "{name:<8}");
            for o in Outcome::ALL {
                let _ = write!(s, " {:>16}", c.get(o));
            }
            let _ = writeln!(s, " {:>6}", c.total());
        };
        for (k, c) in &self.rows {
            line(&k.as_str().to_uppercase(), c);
        }
        line("Total", &self.totals());
        s
    }
}

/// Solve summary kept in a record; the assignment itself is dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub status: SolveStatus,
    pub objective: Option<Int>,
    pub lower_bound: Bound<Int>,
    pub upper_bound: Bound<Int>,
    pub nodes: u64,
}

impl From<&SolveReport<Int>> for SolveSummary {
    fn from(r: &SolveReport<Int>) -> Self {
        SolveSummary {
            status: r.status,
            objective: r.objective,
            lower_bound: r.lower_bound,
            upper_bound: r.upper_bound,
            nodes: r.nodes,
        }
    }
}

/// Everything known about one evaluated case, for review and export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub id: String,
    pub group: String,
    pub kind: ProblemKind,
    pub nl: String,
    pub outcome: Outcome,
    pub target_text: String,
    pub target: SolveSummary,
    /// Final patch text, also when the agents gave up.
    pub generated_text: Option<String>,
    pub generated: Option<SolveSummary>,
    /// Why no generated solve happened.
    pub error: Option<String>,
    pub attempts: usize,
    pub hallucinated: Vec<String>,
    /// Generated minus target objective, when both exist.
    pub objective_delta: Option<Int>,
    pub transcript: Vec<TranscriptEntry>,
    pub wall_time: f64,
}

impl CaseRecord {
    pub fn without_timing(&self) -> Self {
        CaseRecord {
            wall_time: 0.0,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRun {
    pub backend: String,
    pub table: ResultsTable,
    /// Sorted by case id.
    pub records: Vec<CaseRecord>,
}

impl EvalRun {
    pub fn records_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records serialize")
    }

    pub fn without_timing(&self) -> Self {
        EvalRun {
            records: self.records.iter().map(CaseRecord::without_timing).collect(),
            ..self.clone()
        }
    }
}

/// Settings of a test-set run.
#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub limits: SolveLimits,
    pub max_attempts: usize,
    /// Worker threads; `None` uses rayon's default pool.
    pub threads: Option<usize>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            limits: default_eval_limits(),
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            threads: None,
        }
    }
}

/// Solves each distinct model once per run. Variants of one request
/// usually share their target, and correct answers share it too.
#[derive(Default)]
pub struct SolveCache {
    map: Mutex<HashMap<Model, Arc<SolveReport<Int>>>>,
}

impl SolveCache {
    pub fn solve(&self, model: &Model, limits: &SolveLimits) -> Arc<SolveReport<Int>> {
        if let Some(r) = self.map.lock().expect("cache lock").get(model) {
            return r.clone();
        }
        let r = Arc::new(solve(model, limits));
        self.map
            .lock()
            .expect("cache lock")
            .entry(model.clone())
            .or_insert(r)
            .clone()
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, thiserror::Error)]
#[error("case {id}: {message}")]
pub struct CaseSetupError {
    pub id: String,
    pub message: String,
}

/// Evaluates one case. Only a broken target is an error; everything the
/// agents do wrong becomes an outcome.
pub fn evaluate_case(
    case: &TestCase,
    backend: &dyn LlmBackend,
    store: &TfIdfStore,
    opts: &EvalOptions,
    cache: &SolveCache,
) -> Result<CaseRecord, CaseSetupError> {
    let start = Instant::now();
    let setup = |message: String| CaseSetupError {
        id: case.id.clone(),
        message,
    };
    let base: Model = build_model(&case.instance).map_err(|e| setup(e.to_string()))?;
    let target_patch = compile::<Int>(&case.target, &base, &case.instance)
        .map_err(|e| setup(format!("target patch: {}", e.render(&case.target))))?;
    let target_model = apply_patch(&base, &target_patch.patch).map_err(|e| setup(e.to_string()))?;
    let target = cache.solve(&target_model, &opts.limits);

    let ctx = AgentContext::new(&base, &case.instance, store).with_max_attempts(opts.max_attempts);
    let result = run_pipeline(&ctx, &case.nl, backend);

    let mut record = CaseRecord {
        id: case.id.clone(),
        group: case.group.clone(),
        kind: case.kind,
        nl: case.nl.clone(),
        outcome: Outcome::SyntaxError,
        target_text: case.target.clone(),
        target: SolveSummary::from(target.as_ref()),
        generated_text: None,
        generated: None,
        error: None,
        attempts: 0,
        hallucinated: Vec::new(),
        objective_delta: None,
        transcript: Vec::new(),
        wall_time: 0.0,
    };
    match result {
        Ok(r) => {
            record.attempts = r.attempts;
            record.hallucinated = detect_hallucinated_params(&r.patch, &case.instance, &base);
            record.generated_text = Some(r.text);
            record.transcript = r.transcript;
            match apply_patch(&base, &r.grounded) {
                Ok(model) => {
                    let gen = cache.solve(&model, &opts.limits);
                    record.outcome = classify_outcome(&target, Generated::Solved(&gen));
                    record.objective_delta = gen.objective.zip(target.objective).map(|(g, t)| g - t);
                    record.generated = Some(SolveSummary::from(gen.as_ref()));
                }
                Err(e) => {
                    let msg = e.to_string();
                    record.outcome = classify_outcome(&target, Generated::Rejected(&msg));
                    record.error = Some(msg);
                }
            }
        }
        Err(e) => {
            record.outcome = classify_outcome(&target, Generated::Failed(&e.failure));
            record.attempts = e.attempts;
            record.error = Some(e.failure.to_string());
            if let dynsched_agents::Failure::FixExhausted { text, .. } = &e.failure {
                if let Ok(p) = parse(text) {
                    record.hallucinated = detect_hallucinated_params(&p, &case.instance, &base);
                }
                record.generated_text = Some(text.clone());
            }
            record.transcript = e.transcript;
        }
    }
    record.wall_time = start.elapsed().as_secs_f64();
    Ok(record)
}

/// Evaluates every case, in parallel, and tabulates the outcomes.
pub fn run_testset(
    cases: &[TestCase],
    backend: &dyn LlmBackend,
    store: &TfIdfStore,
    opts: &EvalOptions,
) -> Result<EvalRun, CaseSetupError> {
    let cache = SolveCache::default();
    let work = || -> Result<Vec<CaseRecord>, CaseSetupError> {
        cases
            .par_iter()
            .map(|c| evaluate_case(c, backend, store, opts, &cache))
            .collect()
    };
    let mut records = match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| CaseSetupError {
                id: String::new(),
                message: e.to_string(),
            })?
            .install(work)?,
        None => work()?,
    };
    records.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(EvalRun {
        backend: backend.name().to_string(),
        table: ResultsTable::from_records(&records),
        records,
    })
}
