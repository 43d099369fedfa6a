use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_traits::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::{cosine, document_frequencies, tf_idf, SparseVector};

/// Version tag written into persisted stores.
pub const STORE_FORMAT: &str = "dynsched-rag/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Planning,
    Coding,
    DslDoc,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Planning => "planning",
            Stage::Coding => "coding",
            Stage::DslDoc => "dsl_doc",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = RagError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "planning" => Ok(Stage::Planning),
            "coding" => Ok(Stage::Coding),
            "dsl_doc" => Ok(Stage::DslDoc),
            other => Err(RagError::Format(format!("unknown stage {other:?}"))),
        }
    }
}

#[derive(Debug, Error)]
pub enum RagError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed store: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalExample<F> {
    pub id: String,
    pub stage: Stage,
    pub input_text: String,
    pub output_text: String,
    pub vector: SparseVector<F>,
}

/// A ranked retrieval result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit<'a, F> {
    pub example: &'a RetrievalExample<F>,
    pub score: F,
}

/// Ordered example store with a TF-IDF vocabulary over all input texts.
///
/// Every insertion rebuilds the vocabulary and re-embeds all examples, which
/// is cheap at the intended size of a few dozen documents.
#[derive(Debug, Clone, PartialEq)]
pub struct Store<F> {
    examples: Vec<RetrievalExample<F>>,
    vocabulary: BTreeMap<String, usize>,
    inserted: u64,
}

impl<F: Float> Default for Store<F> {
    fn default() -> Self {
        Store {
            examples: Vec::new(),
            vocabulary: BTreeMap::new(),
            inserted: 0,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct StoredExample {
    id: String,
    stage: Stage,
    input: String,
    output: String,
}

#[derive(Serialize, Deserialize)]
struct StoredFile {
    format: String,
    #[serde(default)]
    inserted: u64,
    #[serde(default)]
    vocabulary: BTreeMap<String, usize>,
    examples: Vec<StoredExample>,
}

impl<F: Float> Store<F> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn examples(&self) -> &[RetrievalExample<F>] {
        &self.examples
    }

    /// Token to document frequency.
    pub fn vocabulary(&self) -> &BTreeMap<String, usize> {
        &self.vocabulary
    }

    pub fn count(&self, stage: Stage) -> usize {
        self.examples.iter().filter(|e| e.stage == stage).count()
    }

    /// Adds one example and returns its id.
    pub fn insert(&mut self, stage: Stage, input: impl Into<String>, output: impl Into<String>) -> String {
        let id = self.push(None, stage, input.into(), output.into());
        self.reindex();
        id
    }

    /// Adds several examples with a single re-index.
    pub fn insert_batch<I, A, B>(&mut self, stage: Stage, pairs: I) -> Vec<String>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let ids = pairs
            .into_iter()
            .map(|(a, b)| self.push(None, stage, a.into(), b.into()))
            .collect();
        self.reindex();
        ids
    }

    fn push(&mut self, id: Option<String>, stage: Stage, input: String, output: String) -> String {
        self.inserted += 1;
        let id = id.unwrap_or_else(|| format!("{}-{}", stage, self.inserted));
        self.examples.push(RetrievalExample {
            id: id.clone(),
            stage,
            input_text: input,
            output_text: output,
            vector: SparseVector::default(),
        });
        id
    }

    fn reindex(&mut self) {
        let (df, _) = document_frequencies(self.examples.iter().map(|e| e.input_text.as_str()));
        self.vocabulary = df;
        let docs = self.examples.len();
        for i in 0..self.examples.len() {
            let v = tf_idf(&self.examples[i].input_text, &self.vocabulary, docs);
            self.examples[i].vector = v;
        }
    }

    /// TF-IDF vector of `text`; tokens outside the vocabulary are ignored.
    pub fn embed(&self, text: &str) -> SparseVector<F> {
        tf_idf(text, &self.vocabulary, self.examples.len())
    }

    /// Up to `k` examples of `stage` (or any stage), most similar first;
    /// equal scores keep insertion order.
    pub fn retrieve(&self, query: &str, k: usize, stage: Option<Stage>) -> Vec<Hit<'_, F>> {
        let q = self.embed(query);
        let mut hits: Vec<Hit<'_, F>> = self
            .examples
            .iter()
            .filter(|e| stage.is_none_or(|s| e.stage == s))
            .map(|e| Hit {
                example: e,
                score: cosine(&q, &e.vector),
            })
            .collect();
        // Stable sort keeps insertion order among equal scores.
        hits.sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap_or(std::cmp::Ordering::Equal));
        hits.truncate(k);
        hits
    }

    pub fn to_json(&self) -> String {
        let file = StoredFile {
            format: STORE_FORMAT.to_string(),
            inserted: self.inserted,
            vocabulary: self.vocabulary.clone(),
            examples: self
                .examples
                .iter()
                .map(|e| StoredExample {
                    id: e.id.clone(),
                    stage: e.stage,
                    input: e.input_text.clone(),
                    output: e.output_text.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("store serializes")
    }

    /// Parses a persisted store. The stored vocabulary is checked against the
    /// examples and vectors are recomputed.
    pub fn from_json(text: &str) -> Result<Self, RagError> {
        let file: StoredFile = serde_json::from_str(text).map_err(|e| RagError::Format(e.to_string()))?;
        if file.format != STORE_FORMAT {
            return Err(RagError::Format(format!(
                "expected format {STORE_FORMAT:?}, found {:?}",
                file.format
            )));
        }
        let mut store = Store::new();
        for e in file.examples {
            if store.examples.iter().any(|x| x.id == e.id) {
                return Err(RagError::Format(format!("duplicate id {:?}", e.id)));
            }
            store.push(Some(e.id), e.stage, e.input, e.output);
        }
        store.inserted = store.inserted.max(file.inserted);
        store.reindex();
        if !file.vocabulary.is_empty() && file.vocabulary != store.vocabulary {
            return Err(RagError::Format("vocabulary does not match the examples".into()));
        }
        Ok(store)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), RagError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, RagError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
