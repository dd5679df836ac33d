//! Latent-topic document retrieval over term-document matrices.
//!
//! Three ranking models share one corpus pipeline: plain tf-idf cosine
//! matching, latent semantic analysis over a truncated SVD, and a binary
//! markov-random-field whose document/term weights are learned with a
//! rank-k pseudoinverse. An evaluation harness computes average precision,
//! interpolated precision-recall curves, and rank sweeps over all three.

pub mod error;
pub mod eval;
pub mod ingest;
pub mod linalg;
pub mod lsa;
pub mod mrf;
pub mod pipeline;
pub mod ranking;
pub mod snapshot;
pub mod vsm;

pub use error::{Error, Result};
