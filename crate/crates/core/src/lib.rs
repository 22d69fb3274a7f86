//! Summarization of short, lexically diverse text collections.
//!
//! The pipeline extracts bigram concepts from tokenized sentences, builds a
//! binary concept-sentence co-occurrence matrix, optionally completes it
//! with trace-norm-regularized matrix imputation, and selects summary
//! sentences by maximizing weighted concept coverage under a word budget.
//! ROUGE scoring, reference baselines, and a cross-validated tuning harness
//! round out the evaluation side.

pub mod baselines;
pub mod cooccurrence;
pub mod corpus;
pub mod error;
pub mod experiment;
pub mod impute;
pub mod rouge;
pub mod solver;
pub mod svd;
pub mod text;

pub use cooccurrence::CooccurrenceMatrix;
pub use corpus::Corpus;
pub use error::{Error, Result};
pub use experiment::{AnalyzedCorpus, ExperimentConfig, Method};
pub use impute::{ImputeConfig, ImputedMatrix};
pub use solver::{SelectionProblem, Summary, ZMode};
pub use text::{Concept, Prompt, ResponseUnit, Sentence, StopwordList};
