//! Optional dense embeddings from an external service.
//!
//! The store itself always uses TF-IDF. A remote embedder can rank texts
//! through [`rank_dense`] when a deployment wants neural embeddings; nothing
//! in the offline pipeline depends on it.

use num_traits::Float;

pub trait RemoteEmbedder<F: Float>: Send + Sync {
    type Error: std::error::Error + Send + Sync + 'static;

    /// One dense vector per input text, all of equal length.
    fn embed(&self, texts: &[&str]) -> Result<Vec<Vec<F>>, Self::Error>;
}

fn dense_cosine<F: Float>(a: &[F], b: &[F]) -> F {
    let dot = a.iter().zip(b).fold(F::zero(), |acc, (&x, &y)| acc + x * y);
    let na = a.iter().fold(F::zero(), |acc, &x| acc + x * x).sqrt();
    let nb = b.iter().fold(F::zero(), |acc, &x| acc + x * x).sqrt();
    if (na * nb).is_zero() {
        F::zero()
    } else {
        dot / (na * nb)
    }
}

/// Indices of `candidates` ordered by dense cosine similarity to `query`,
/// best first, ties in input order.
pub fn rank_dense<F: Float, E: RemoteEmbedder<F>>(
    embedder: &E,
    query: &str,
    candidates: &[&str],
) -> Result<Vec<(usize, F)>, E::Error> {
    let mut texts = Vec::with_capacity(candidates.len() + 1);
    texts.push(query);
    texts.extend_from_slice(candidates);
    let vectors = embedder.embed(&texts)?;
    let (q, rest) = vectors.split_first().expect("embedder returns one vector per text");
    let mut scored: Vec<(usize, F)> = rest.iter().enumerate().map(|(i, v)| (i, dense_cosine(q, v))).collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    Ok(scored)
}
