//! The constraint patch language.
//!
//! Agent output is a small declarative text: new parameters, new variable
//! families, quantified linear constraints and removals of model constraint
//! groups. [`parse`] turns text into a [`Patch`], [`bind`] resolves names
//! against a model and its instance data, and [`ground`] expands quantifiers
//! into a numeric [`GroundedPatch`](dynsched_core::GroundedPatch). [`compile`]
//! runs all three.

pub mod ast;
mod bind;
pub mod docs;
mod error;
mod ground;
mod lexer;
mod parser;
pub mod pretty;

pub use ast::{Cmp, Decl, DeclKind, Expr, ExprKind, Patch, Span};
pub use bind::{bind, BoundPatch};
pub use docs::{doc_lookup, DocSection, REFERENCE};
pub use error::{DslError, DslWarning, ParseError};
pub use ground::{ground, Affine, Grounded};
pub use parser::parse;
pub use pretty::pretty_print;

use dynsched_core::{Instance, ModelIr, Scalar};

/// Reserved words; they cannot be used as names.
pub fn keywords() -> &'static [&'static str] {
    lexer::KEYWORDS
}

/// Parses, binds and grounds `text` against `model`.
pub fn compile<S: Scalar>(text: &str, model: &ModelIr<S>, instance: &Instance) -> Result<Grounded<S>, DslError> {
    let patch = parse(text)?;
    let bound = bind(&patch, model, instance)?;
    ground(&bound, model)
}
