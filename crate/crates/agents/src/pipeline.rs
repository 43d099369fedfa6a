//! Planning, coding and the patch-fixing loop.

use dynsched_core::{Instance, Model, Patch as GroundedPatch};
use dynsched_dsl::{compile, doc_lookup, parse, DslError, DslWarning, Patch};
use dynsched_rag::TfIdfStore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::{BackendError, LlmBackend};
use crate::plan::{PlanParseError, PlanSections};
use crate::prompts::{self, PromptStage};

pub const DEFAULT_MAX_ATTEMPTS: usize = 3;

/// What a pipeline run needs to know about the problem being changed.
#[derive(Clone, Copy)]
pub struct AgentContext<'a> {
    pub model: &'a Model,
    pub instance: &'a Instance,
    pub store: &'a TfIdfStore,
    /// Total coding calls allowed, the first attempt included.
    pub max_attempts: usize,
}

impl<'a> AgentContext<'a> {
    pub fn new(model: &'a Model, instance: &'a Instance, store: &'a TfIdfStore) -> Self {
        AgentContext {
            model,
            instance,
            store,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        }
    }

    pub fn with_max_attempts(mut self, n: usize) -> Self {
        self.max_attempts = n.max(1);
        self
    }
}

/// One backend call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub stage: PromptStage,
    pub prompt: String,
    pub response: String,
    /// `None` when the response was usable.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchResult {
    pub plan: PlanSections,
    pub text: String,
    pub patch: Patch,
    pub grounded: GroundedPatch,
    pub warnings: Vec<DslWarning>,
    /// Coding calls made, at least one.
    pub attempts: usize,
    pub transcript: Vec<TranscriptEntry>,
}

#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
pub enum Failure {
    #[error("patch still rejected after {attempts} attempts: {error}")]
    FixExhausted { error: DslError, text: String, attempts: usize },
    #[error(transparent)]
    PlanParse(PlanParseError),
    #[error(transparent)]
    Backend(BackendError),
}

#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
#[error("{failure}")]
pub struct PipelineError {
    pub failure: Failure,
    pub plan: Option<PlanSections>,
    pub attempts: usize,
    pub transcript: Vec<TranscriptEntry>,
}

/// Transcript that a stage appends to as it calls the backend.
#[derive(Default)]
pub struct Trace {
    pub entries: Vec<TranscriptEntry>,
}

impl Trace {
    fn call(&mut self, backend: &dyn LlmBackend, stage: PromptStage, prompt: String) -> Result<String, BackendError> {
        match backend.complete(&prompt) {
            Ok(response) => {
                self.entries.push(TranscriptEntry {
                    stage,
                    prompt,
                    response: response.clone(),
                    error: None,
                });
                Ok(response)
            }
            Err(e) => {
                self.entries.push(TranscriptEntry {
                    stage,
                    prompt,
                    response: String::new(),
                    error: Some(e.to_string()),
                });
                Err(e)
            }
        }
    }

    fn reject(&mut self, error: String) {
        if let Some(last) = self.entries.last_mut() {
            last.error = Some(error);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error(transparent)]
    Parse(PlanParseError),
    #[error(transparent)]
    Backend(BackendError),
}

/// Planning stage. An unreadable answer is re-asked once with the error
/// appended.
pub fn plan(ctx: &AgentContext<'_>, nl: &str, backend: &dyn LlmBackend, trace: &mut Trace) -> Result<PlanSections, PlanError> {
    let prompt = prompts::planning_prompt(ctx.model, ctx.instance, ctx.store, nl);
    let first = trace
        .call(backend, PromptStage::Planning, prompt.clone())
        .map_err(PlanError::Backend)?;
    match PlanSections::parse(&first) {
        Ok(p) => Ok(p),
        Err(e) => {
            trace.reject(e.to_string());
            let again = prompts::replanning_prompt(&prompt, &e.to_string());
            let second = trace
                .call(backend, PromptStage::Planning, again)
                .map_err(PlanError::Backend)?;
            PlanSections::parse(&second).map_err(|e| {
                trace.reject(e.to_string());
                PlanError::Parse(e)
            })
        }
    }
}

/// Removes a surrounding markdown code fence, if any.
pub fn strip_fences(text: &str) -> String {
    let t = text.trim();
    if let Some(rest) = t.strip_prefix("```") {
        let body = rest.split_once('\n').map_or("", |(_, b)| b);
        return body.trim_end().trim_end_matches("```").trim().to_string() + "\n";
    }
    format!("{t}\n")
}

/// Coding stage: one backend call, returning the patch text and its parse.
pub fn code(
    ctx: &AgentContext<'_>,
    nl: &str,
    plan: &PlanSections,
    backend: &dyn LlmBackend,
    trace: &mut Trace,
) -> Result<(String, Result<Patch, DslError>), BackendError> {
    let prompt = prompts::coding_prompt(ctx.model, ctx.store, nl, plan);
    let text = strip_fences(&trace.call(backend, PromptStage::Coding, prompt)?);
    let parsed = parse(&text).map_err(DslError::from);
    Ok((text, parsed))
}

/// One repair call for text that failed with `error`.
pub fn repair(
    nl: &str,
    failed_text: &str,
    error: &DslError,
    backend: &dyn LlmBackend,
    trace: &mut Trace,
) -> Result<(String, Result<Patch, DslError>), BackendError> {
    let doc = doc_lookup(&error.lookup_key());
    let prompt = prompts::repair_prompt(nl, failed_text, error, &doc);
    let text = strip_fences(&trace.call(backend, PromptStage::Repair, prompt)?);
    let parsed = parse(&text).map_err(DslError::from);
    Ok((text, parsed))
}

/// Plan, code, then compile against the context model, repairing until the
/// patch compiles or `max_attempts` coding calls have been made. The model
/// is not modified.
#[allow(clippy::result_large_err)]
pub fn run_pipeline(ctx: &AgentContext<'_>, nl: &str, backend: &dyn LlmBackend) -> Result<PatchResult, PipelineError> {
    let mut trace = Trace::default();
    let fail = |failure, plan, attempts, trace: Trace| PipelineError {
        failure,
        plan,
        attempts,
        transcript: trace.entries,
    };

    let plan_sections = match plan(ctx, nl, backend, &mut trace) {
        Ok(p) => p,
        Err(PlanError::Parse(e)) => return Err(fail(Failure::PlanParse(e), None, 0, trace)),
        Err(PlanError::Backend(e)) => return Err(fail(Failure::Backend(e), None, 0, trace)),
    };

    let (mut text, mut parsed) = match code(ctx, nl, &plan_sections, backend, &mut trace) {
        Ok(r) => r,
        Err(e) => return Err(fail(Failure::Backend(e), Some(plan_sections), 1, trace)),
    };
    let mut attempts = 1;
    loop {
        let compiled = parsed.and_then(|patch| {
            let bound = dynsched_dsl::bind(&patch, ctx.model, ctx.instance)?;
            let grounded = dynsched_dsl::ground(&bound, ctx.model)?;
            Ok((patch, grounded))
        });
        let error = match compiled {
            Ok((patch, grounded)) => {
                return Ok(PatchResult {
                    plan: plan_sections,
                    text,
                    patch,
                    grounded: grounded.patch,
                    warnings: grounded.warnings,
                    attempts,
                    transcript: trace.entries,
                });
            }
            Err(e) => e,
        };
        trace.reject(error.render(&text));
        if attempts >= ctx.max_attempts {
            let failure = Failure::FixExhausted { error, text, attempts };
            return Err(fail(failure, Some(plan_sections), attempts, trace));
        }
        match repair(nl, &text, &error, backend, &mut trace) {
            Ok((t, p)) => {
                text = t;
                parsed = p;
            }
            Err(e) => return Err(fail(Failure::Backend(e), Some(plan_sections), attempts + 1, trace)),
        }
        attempts += 1;
    }
}

/// Compiles `text` directly, skipping the agents. Used for expert edits.
pub fn compile_text(ctx: &AgentContext<'_>, text: &str) -> Result<(Patch, dynsched_dsl::Grounded<i64>), DslError> {
    let patch = parse(text)?;
    let grounded = compile(text, ctx.model, ctx.instance)?;
    Ok((patch, grounded))
}
