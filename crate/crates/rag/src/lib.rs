//! A small retrieval store for (input, output) example pairs.
//!
//! Texts are embedded as TF-IDF vectors over the store's own vocabulary and
//! ranked by cosine similarity. The float type is generic; [`TfIdfStore`]
//! fixes it to `f64`.

mod embed;
mod remote;
mod store;

pub use embed::{cosine, tokenize, SparseVector};
pub use remote::{rank_dense, RemoteEmbedder};
pub use store::{Hit, RagError, RetrievalExample, Stage, Store, STORE_FORMAT};

pub type TfIdfStore = Store<f64>;

/// Seed examples for the gig-scheduling problem: planning and coding pairs
/// whose outputs are written in the constraint DSL.
pub const GSP_SEED: &str = include_str!("../assets/gsp_seed.json");

/// A store holding [`GSP_SEED`].
pub fn seeded_store() -> TfIdfStore {
    TfIdfStore::from_json(GSP_SEED).expect("bundled seed corpus is valid")
}
