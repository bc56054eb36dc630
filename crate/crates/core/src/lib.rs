//! Syntactic data augmentation for natural language inference.
//!
//! The pipeline reads an MNLI-shaped corpus with constituency parses
//! ([`corpus`], [`treebank`]), selects transitive matrix clauses
//! ([`clause`]), rewrites them by subject/object inversion and
//! passivization with agreement repair ([`transforms`], [`morphology`]), and
//! assembles seeded, size-tiered augmentation sets ([`augmentation`]).
//! [`diagnostics`] generates template-based challenge examples for the
//! lexical overlap, subsequence and constituent heuristics and scores
//! predictions against them; [`probe`] is a small logistic classifier used
//! to measure how augmentation changes what a model learns.

pub mod augmentation;
pub mod clause;
pub mod corpus;
pub mod diagnostics;
pub mod morphology;
pub mod probe;
pub mod synth;
pub mod transforms;
pub mod treebank;

#[cfg(feature = "cli")]
pub mod cli;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
