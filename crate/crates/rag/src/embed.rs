use std::collections::BTreeMap;

use num_traits::Float;

/// Lowercased alphanumeric runs; everything else separates tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Non-negative sparse vector keyed by token, kept sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector<F> {
    pub entries: BTreeMap<String, F>,
}

impl<F> Default for SparseVector<F> {
    fn default() -> Self {
        SparseVector { entries: BTreeMap::new() }
    }
}

impl<F: Float> SparseVector<F> {
    pub fn get(&self, token: &str) -> F {
        self.entries.get(token).copied().unwrap_or_else(F::zero)
    }

    pub fn norm(&self) -> F {
        self.entries.values().fold(F::zero(), |acc, &v| acc + v * v).sqrt()
    }

    pub fn dot(&self, other: &Self) -> F {
        let (small, large) = if self.entries.len() <= other.entries.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .entries
            .iter()
            .filter_map(|(t, &a)| large.entries.get(t).map(|&b| a * b))
            .fold(F::zero(), |acc, x| acc + x)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|v| v.is_zero())
    }
}

/// Cosine similarity; zero when either vector is zero. Clamped to `[0, 1]`
/// to absorb rounding on non-negative inputs.
pub fn cosine<F: Float>(a: &SparseVector<F>, b: &SparseVector<F>) -> F {
    let denom = a.norm() * b.norm();
    if denom.is_zero() {
        return F::zero();
    }
    (a.dot(b) / denom).max(F::zero()).min(F::one())
}

/// Document frequencies over a set of texts.
pub(crate) fn document_frequencies<'a>(texts: impl Iterator<Item = &'a str>) -> (BTreeMap<String, usize>, usize) {
    let mut df = BTreeMap::new();
    let mut docs = 0;
    for text in texts {
        docs += 1;
        let mut seen: Vec<String> = tokenize(text);
        seen.sort();
        seen.dedup();
        for t in seen {
            *df.entry(t).or_insert(0) += 1;
        }
    }
    (df, docs)
}

/// `tf * (ln((1 + docs) / (1 + df)) + 1)` for every token known to `df`.
pub(crate) fn tf_idf<F: Float>(text: &str, df: &BTreeMap<String, usize>, docs: usize) -> SparseVector<F> {
    let mut tf: BTreeMap<String, usize> = BTreeMap::new();
    for t in tokenize(text) {
        if df.contains_key(&t) {
            *tf.entry(t).or_insert(0) += 1;
        }
    }
    let n = F::from(docs).expect("document count fits the float type");
    let entries = tf
        .into_iter()
        .map(|(t, count)| {
            let d = F::from(df[&t]).expect("frequency fits the float type");
            let idf = ((F::one() + n) / (F::one() + d)).ln() + F::one();
            (t, F::from(count).expect("count fits the float type") * idf)
        })
        .collect();
    SparseVector { entries }
}
