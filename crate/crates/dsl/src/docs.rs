//! The language reference and error-driven lookup into it.

use std::sync::OnceLock;

use dynsched_rag::{Stage, TfIdfStore};

/// The reference document, one `## ` section per construct.
pub const REFERENCE: &str = include_str!("../assets/reference.md");

pub const GRAMMAR_SECTION: &str = "Grammar summary";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocSection {
    pub title: String,
    pub body: String,
}

impl DocSection {
    pub fn render(&self) -> String {
        format!("## {}\n\n{}", self.title, self.body)
    }
}

/// Splits the reference into its sections, in document order.
pub fn sections() -> &'static [DocSection] {
    static SECTIONS: OnceLock<Vec<DocSection>> = OnceLock::new();
    SECTIONS.get_or_init(|| {
        let mut out: Vec<DocSection> = Vec::new();
        for line in REFERENCE.lines() {
            if let Some(title) = line.strip_prefix("## ") {
                out.push(DocSection {
                    title: title.trim().to_string(),
                    body: String::new(),
                });
            } else if let Some(cur) = out.last_mut() {
                cur.body.push_str(line);
                cur.body.push('\n');
            }
        }
        for s in &mut out {
            s.body = s.body.trim().to_string();
        }
        out
    })
}

pub fn section(title: &str) -> Option<&'static DocSection> {
    sections().iter().find(|s| s.title == title)
}

/// Store with one documentation example per section: the input is the
/// section text and the output its title.
pub fn doc_store() -> &'static TfIdfStore {
    static STORE: OnceLock<TfIdfStore> = OnceLock::new();
    STORE.get_or_init(|| {
        let mut store = TfIdfStore::new();
        store.insert_batch(
            Stage::DslDoc,
            sections()
                .iter()
                .filter(|s| s.title != GRAMMAR_SECTION)
                .map(|s| (format!("{}\n{}", s.title, s.body), s.title.clone())),
        );
        store
    })
}

fn keyword_section(key: &str) -> Option<&'static str> {
    let (kind, rest) = key.split_once(' ').unwrap_or((key, ""));
    Some(match kind {
        "UnknownParameter" => "param declarations and instance data binding",
        "UnknownVariable" => "var declarations and model variables",
        "ArityMismatch" | "BoundsViolation" | "ShapeMismatch" | "TypeError" => "indexing and shapes",
        "NonlinearTerm" | "Overflow" => "linearity",
        "UnknownGroup" => "relax declarations",
        "DuplicateName" => "names and duplicates",
        "EmptyRange" => "forall quantifiers",
        "ParseError" => {
            let expected = rest.strip_prefix("expected").unwrap_or(rest);
            if expected.contains("binder") || expected.contains("'..'") || expected.contains("'in'") {
                "forall quantifiers"
            } else if expected.contains("'bool'") || expected.contains("'int'") {
                "var declarations and model variables"
            } else if expected.contains("'<='") || expected.contains("operator") {
                "constraint form and comparisons"
            } else {
                return None;
            }
        }
        _ => return None,
    })
}

/// Reference section most relevant to an error key such as
/// `"UnknownParameter"` or `"ParseError expected binder"`. Parse errors not
/// covered by the keyword map are matched by retrieval over the sections;
/// anything else gets the grammar summary.
pub fn doc_lookup(error_kind: &str) -> DocSection {
    let grammar = || section(GRAMMAR_SECTION).expect("reference has a grammar summary").clone();
    if let Some(title) = keyword_section(error_kind.trim()) {
        return section(title).cloned().unwrap_or_else(grammar);
    }
    if let Some(rest) = error_kind.trim().strip_prefix("ParseError") {
        let query = rest.replace(['\'', '`'], " ");
        if let Some(hit) = doc_store().retrieve(&query, 1, Some(Stage::DslDoc)).first() {
            if hit.score > 0.0 {
                return section(&hit.example.output_text).cloned().unwrap_or_else(grammar);
            }
        }
    }
    grammar()
}
