//! Corpus ingestion: record parsing, tokenization, stemming, vocabulary and
//! count-matrix construction.

pub mod porter;
pub mod smart;
pub mod tokenize;
mod vocab;

pub use porter::stem;
pub use smart::{parse_qrels, parse_smart_docs, parse_smart_queries, write_smart_docs};
pub use tokenize::tokenize;
pub use vocab::{build_count_matrix, build_vocabulary, TermDocumentMatrix, Vocabulary, Weighting};

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// Source collection of a document or query.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Collection {
    Cran,
    Cacm,
    Cisi,
    Med,
    Other(String),
}

impl Collection {
    /// Case-insensitive name lookup; unknown names become [`Collection::Other`].
    pub fn from_name(name: &str) -> Self {
        match name.to_ascii_lowercase().as_str() {
            "cran" => Collection::Cran,
            "cacm" => Collection::Cacm,
            "cisi" => Collection::Cisi,
            "med" => Collection::Med,
            _ => Collection::Other(name.to_ascii_lowercase()),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Collection::Cran => "cran",
            Collection::Cacm => "cacm",
            Collection::Cisi => "cisi",
            Collection::Med => "med",
            Collection::Other(name) => name,
        }
    }
}

impl fmt::Display for Collection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One parsed document: title and body sections joined into `text`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub id: u32,
    pub collection: Collection,
    pub text: String,
}

/// One parsed query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawQuery {
    pub id: u32,
    pub collection: Collection,
    pub text: String,
}

/// Binary relevance judgments: a stored pair means "relevant".
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QrelSet {
    entries: BTreeSet<(u32, u32)>,
}

impl QrelSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, query_id: u32, doc_id: u32) {
        self.entries.insert((query_id, doc_id));
    }

    pub fn contains(&self, query_id: u32, doc_id: u32) -> bool {
        self.entries.contains(&(query_id, doc_id))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.entries.iter().copied()
    }

    /// Doc ids judged relevant for `query_id`, in ascending order.
    pub fn relevant_docs(&self, query_id: u32) -> Vec<u32> {
        self.entries
            .range((query_id, 0)..=(query_id, u32::MAX))
            .map(|&(_, d)| d)
            .collect()
    }

    pub fn relevant_count(&self, query_id: u32) -> usize {
        self.entries
            .range((query_id, 0)..=(query_id, u32::MAX))
            .count()
    }

    /// Check that every referenced id exists in the given query and
    /// document id sets.
    pub fn validate(
        &self,
        query_ids: &BTreeSet<u32>,
        doc_ids: &BTreeSet<u32>,
    ) -> crate::error::Result<()> {
        for (q, d) in self.iter() {
            if !query_ids.contains(&q) {
                return Err(crate::error::Error::Inconsistency(format!(
                    "judgment references unknown query id {q}"
                )));
            }
            if !doc_ids.contains(&d) {
                return Err(crate::error::Error::Inconsistency(format!(
                    "judgment for query {q} references unknown doc id {d}"
                )));
            }
        }
        Ok(())
    }
}
