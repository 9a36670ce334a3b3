//! Requirement pair classification.
//!
//! Pairs of software requirements are classified as conflict, duplicate or
//! neutral by a feed-forward head over bi-encoder pair features
//! (`u ⊕ v ⊕ (u − v)`). Conflict predictions can then be re-checked by one of
//! three rule-based filters (actor/action overlap, shared nouns and verbs,
//! shared predicates with overlapping arguments). The [`eval`] module holds
//! metrics, k-fold and cross-domain runners and the combined 5x2cv F-test.
//!
//! Everything runs without external models: [`features::builtin_embed`]
//! provides a hashed character n-gram encoder and [`filters::pos`] a small
//! rule-based tagger. Higher-fidelity embeddings and annotations can be
//! loaded from JSONL interchange files.

pub mod classifier;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod filters;
pub mod pipeline;

pub use corpus::{Label, Mode, PairDataset, PairKey, Requirement, RequirementPair};
pub use error::{Error, Result};
