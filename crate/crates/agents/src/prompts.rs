//! Prompt assembly. Every prompt is a pure function of its inputs.

use std::fmt::Write;

use dynsched_core::{Instance, Model, ParamValue, VarKind};
use dynsched_dsl::{docs, DocSection, DslError};
use dynsched_rag::{Stage, TfIdfStore};
use serde::{Deserialize, Serialize};

use crate::plan::PlanSections;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptStage {
    Planning,
    Coding,
    Repair,
    Paraphrase,
}

impl PromptStage {
    pub fn as_str(self) -> &'static str {
        match self {
            PromptStage::Planning => "planning",
            PromptStage::Coding => "coding",
            PromptStage::Repair => "repair",
            PromptStage::Paraphrase => "paraphrase",
        }
    }

    fn header(self) -> &'static str {
        match self {
            PromptStage::Planning => PLANNING_HEADER,
            PromptStage::Coding => CODING_HEADER,
            PromptStage::Repair => REPAIR_HEADER,
            PromptStage::Paraphrase => PARAPHRASE_HEADER,
        }
    }

    /// Stage of an assembled prompt, recognized by its opening line.
    pub fn detect(prompt: &str) -> Option<PromptStage> {
        [
            PromptStage::Planning,
            PromptStage::Coding,
            PromptStage::Repair,
            PromptStage::Paraphrase,
        ]
        .into_iter()
        .find(|s| prompt.starts_with(s.header().lines().next().unwrap_or_default()))
    }

    /// Whether the call produces patch text.
    pub fn is_coding(self) -> bool {
        matches!(self, PromptStage::Coding | PromptStage::Repair)
    }
}

const PLANNING_HEADER: &str = "\
You plan changes to a workforce scheduling model.
A planner has described a new requirement in everyday language. Decide which
parameters, decision variables and constraints must be added to the model
described below so that it honours the requirement.

Reply with three headed sections in this order and nothing else:
New Parameters:
New Variables:
New Constraints:
Under the first two headings write one `name: meaning` line per item, or
None. Only introduce parameters named in the request or listed among the
available data keys. Under the last heading state each constraint in
mathematical terms over the model's names.";

const CODING_HEADER: &str = "\
You write constraint patches for a workforce scheduling model.
Turn the plan below into a patch in the patch language summarized at the
end. Declare every parameter the patch uses, reuse existing variable names
exactly, and reply with the patch text only.";

const REPAIR_HEADER: &str = "\
You fix constraint patches for a workforce scheduling model.
The patch below was rejected by the patch compiler. Read the error and the
reference excerpt, then reply with a corrected patch and nothing else.";

const PARAPHRASE_HEADER: &str = "\
You rewrite scheduling requests.";

/// Marker of the line carrying the planner's request.
pub const REQUEST_PREFIX: &str = "Request: ";

/// The planner's request as it appears in a prompt.
pub fn request_line(prompt: &str) -> Option<&str> {
    prompt.lines().find_map(|l| l.strip_prefix(REQUEST_PREFIX))
}

fn dims(d: &[usize]) -> String {
    if d.is_empty() {
        String::new()
    } else {
        format!("[{}]", d.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
    }
}

/// Parameters, decision variables and constraint groups of `model`, plus
/// the instance keys the model itself does not use.
pub fn model_listing(model: &Model, instance: &Instance) -> String {
    let mut s = String::new();
    s.push_str("Parameters:\n");
    for p in &model.params {
        let _ = write!(s, "- {}{}: {}", p.name, dims(p.value.dims()), p.description);
        if let ParamValue::Scalar(v) = p.value {
            let _ = write!(s, " (= {v})");
        }
        s.push('\n');
    }
    s.push_str("Decision Variables:\n");
    for f in &model.families {
        let ty = match f.kind {
            VarKind::Boolean => "boolean".to_string(),
            VarKind::Integer { lo, hi } => format!("integer in {lo}..={hi}"),
        };
        let _ = writeln!(s, "- {}{} {ty}: {}", f.name, dims(&f.dims), f.description);
    }
    s.push_str("Constraints:\n");
    for g in &model.groups {
        let _ = writeln!(s, "- {}: {}", g.name, g.description);
    }
    let extra: Vec<&str> = instance
        .data
        .keys()
        .filter(|k| model.param(k).is_none())
        .map(String::as_str)
        .collect();
    let _ = write!(
        s,
        "Available data keys: {}",
        if extra.is_empty() { "none".to_string() } else { extra.join(", ") }
    );
    s
}

/// Compact view of the model the patch will be applied to.
pub fn model_summary(model: &Model) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Model `{}` with {} variables.", model.name, model.num_vars());
    s.push_str("Variable families: ");
    s.push_str(
        &model
            .families
            .iter()
            .map(|f| format!("{}{}", f.name, dims(&f.dims)))
            .collect::<Vec<_>>()
            .join(", "),
    );
    s.push_str("\nConstraint groups: ");
    s.push_str(
        &model
            .groups
            .iter()
            .map(|g| format!("{} ({} rows)", g.name, g.len()))
            .collect::<Vec<_>>()
            .join(", "),
    );
    s
}

fn example_block(store: &TfIdfStore, stage: Stage, query: &str, input_label: &str, output_label: &str) -> Option<String> {
    let hit = store.retrieve(query, 1, Some(stage)).into_iter().next()?;
    Some(format!(
        "Here is a worked example.\n{input_label}\n{}\n{output_label}\n{}",
        hit.example.input_text.trim(),
        hit.example.output_text.trim()
    ))
}

/// Planning prompt: header, retrieved example (omitted when the store has
/// no planning example), problem description with listings, request.
pub fn planning_prompt(model: &Model, instance: &Instance, store: &TfIdfStore, nl: &str) -> String {
    let mut blocks = vec![PLANNING_HEADER.to_string()];
    if let Some(ex) = example_block(store, Stage::Planning, nl, "Example request:", "Example answer:") {
        blocks.push(ex);
    }
    blocks.push(format!(
        "Problem description:\n{}\n\n{}",
        model.description.trim(),
        model_listing(model, instance)
    ));
    blocks.push(format!("{REQUEST_PREFIX}{}", one_line(nl)));
    blocks.join("\n\n")
}

/// Planning prompt asked again after an unusable answer.
pub fn replanning_prompt(first: &str, error: &str) -> String {
    format!(
        "{first}\n\nError: {}\nYour previous answer could not be read. Use exactly the three headings.",
        one_line(error)
    )
}

/// Retrieval query of the coding stage: request followed by the plan.
pub fn coding_query(nl: &str, plan: &PlanSections) -> String {
    format!("{}\n{}", nl.trim(), plan.render())
}

/// Coding prompt: header, retrieved example, problem description, plan,
/// current model summary, language summary.
pub fn coding_prompt(model: &Model, store: &TfIdfStore, nl: &str, plan: &PlanSections) -> String {
    let mut blocks = vec![CODING_HEADER.to_string()];
    if let Some(ex) = example_block(store, Stage::Coding, &coding_query(nl, plan), "Request and plan:", "Patch:") {
        blocks.push(ex);
    }
    blocks.push(format!("Problem description:\n{}", model.description.trim()));
    blocks.push(format!("Plan\n{REQUEST_PREFIX}{}\n{}", one_line(nl), plan.render()));
    blocks.push(format!("Current model:\n{}", model_summary(model)));
    blocks.push(format!(
        "Patch language:\n{}",
        docs::section(docs::GRAMMAR_SECTION).map_or("", |s| s.body.as_str())
    ));
    blocks.join("\n\n")
}

/// Repair prompt: the compiler error, the matching reference section and
/// the rejected text.
pub fn repair_prompt(nl: &str, failed_text: &str, error: &DslError, doc: &DocSection) -> String {
    format!(
        "{REPAIR_HEADER}\n\n{REQUEST_PREFIX}{}\nError: {}\n\nReference:\n{}\n\nRejected patch:\n{}",
        one_line(nl),
        one_line(&error.render(failed_text)),
        doc.render(),
        failed_text.trim_end()
    )
}

pub fn paraphrase_prompt(nl: &str, n: usize) -> String {
    format!(
        "{PARAPHRASE_HEADER}\nGive {n} different wordings of the request below. Keep every name, number and \
         condition unchanged, vary only the phrasing. Number the wordings 1 to {n}, one per line.\n\n\
         {REQUEST_PREFIX}{}",
        one_line(nl)
    )
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}
