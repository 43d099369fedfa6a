//! The LLM agents: planning, coding, repair and paraphrasing.
//!
//! Every model call goes through [`LlmBackend`]. Tests and evaluation use
//! [`FixtureBackend`], which replays recorded responses keyed by a hash of
//! the prompt, so a run is fully deterministic.

pub mod backend;
pub mod config;
pub mod http;
pub mod paraphrase;
pub mod pipeline;
pub mod plan;
pub mod prompts;

pub use backend::{
    prompt_excerpt, prompt_hash, BackendError, Fixture, FixtureBackend, FixtureRecord, FnBackend, LlmBackend,
    RecordingBackend, Script, ScriptedBackend,
};
pub use config::{AgentConfig, BackendKind};
pub use paraphrase::{paraphrase, Paraphrase, ParaphraseError};
pub use pipeline::{
    code, plan, repair, run_pipeline, AgentContext, Failure, PatchResult, PipelineError, PlanError, Trace,
    TranscriptEntry, DEFAULT_MAX_ATTEMPTS,
};
pub use plan::{PlanItem, PlanParseError, PlanSections};
pub use prompts::PromptStage;
