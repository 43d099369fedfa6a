//! Paraphrase generation for growing a test set.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::{BackendError, LlmBackend};
use crate::prompts::paraphrase_prompt;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum ParaphraseError {
    #[error(transparent)]
    Backend(BackendError),
    #[error("expected {expected} numbered variants, found {found}")]
    ListParse { expected: usize, found: usize },
}

/// A generated wording. Generated text can drop or alter details, so every
/// variant starts out flagged for a human to check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paraphrase {
    pub text: String,
    pub needs_review: bool,
}

/// Text of a line shaped like `3. text` or `3) text`.
fn numbered(line: &str) -> Option<(usize, &str)> {
    let t = line.trim().trim_start_matches(['*', '-', ' ']);
    let digits = t.chars().take_while(char::is_ascii_digit).count();
    let n = t[..digits].parse().ok()?;
    let rest = t[digits..].strip_prefix(['.', ')', ':'])?.trim();
    (!rest.is_empty()).then_some((n, rest))
}

/// Numbered variants of a response, in order of appearance, one per number.
pub fn parse_numbered(text: &str) -> Vec<String> {
    let mut seen = std::collections::BTreeSet::new();
    text.lines()
        .filter_map(numbered)
        .filter(|(n, _)| seen.insert(*n))
        .map(|(_, s)| s.trim_matches('"').to_string())
        .collect()
}

/// Asks for `n` variants of `nl` in one call.
pub fn paraphrase(nl: &str, n: usize, backend: &dyn LlmBackend) -> Result<Vec<Paraphrase>, ParaphraseError> {
    let n = n.max(1);
    let response = backend
        .complete(&paraphrase_prompt(nl, n))
        .map_err(ParaphraseError::Backend)?;
    let variants = parse_numbered(&response);
    if variants.len() < n {
        return Err(ParaphraseError::ListParse {
            expected: n,
            found: variants.len(),
        });
    }
    Ok(variants
        .into_iter()
        .take(n)
        .map(|text| Paraphrase { text, needs_review: true })
        .collect())
}
