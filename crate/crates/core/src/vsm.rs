//! Vector-space baseline: tf-idf weighting and cosine ranking against the
//! raw term-document matrix.

use crate::error::{Error, Result};
use crate::ingest::{TermDocumentMatrix, Vocabulary, Weighting};
use crate::linalg::CscMatrix;
use crate::ranking::RankedList;

/// Term-space query vector, weighted like the matrix it is matched against.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryVector {
    values: Vec<f64>,
    binary: bool,
}

impl QueryVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument(
                "query weights must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            values,
            binary: false,
        })
    }

    /// Binary presence-indicator query.
    pub fn from_indicators(on: &[bool]) -> Self {
        Self {
            values: on.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
            binary: true,
        }
    }

    /// Query term counts scaled by the corpus idf table.
    pub fn tfidf(vocab: &Vocabulary, text: &str, idf: &[f64]) -> Self {
        let mut values = vec![0.0; vocab.len()];
        for (pos, count) in vocab.term_counts(text) {
            values[pos] = f64::from(count) * idf[pos];
        }
        Self {
            values,
            binary: false,
        }
    }

    /// Raw query term counts.
    pub fn counts(vocab: &Vocabulary, text: &str) -> Self {
        let mut values = vec![0.0; vocab.len()];
        for (pos, count) in vocab.term_counts(text) {
            values[pos] = f64::from(count);
        }
        Self {
            values,
            binary: false,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_binary(&self) -> bool {
        self.binary
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Nonzero (position, weight) pairs in ascending position order.
    pub fn nonzero(&self) -> Vec<(usize, f64)> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, v))
            .collect()
    }
}

/// Natural-log inverse document frequency per term; a term present in every
/// document gets weight zero.
pub fn idf_table(df: &[usize], n_docs: usize) -> Result<Vec<f64>> {
    let m = n_docs as f64;
    df.iter()
        .map(|&d| {
            if d == 0 {
                Err(Error::Inconsistency(
                    "vocabulary term with zero document frequency".into(),
                ))
            } else {
                Ok((m / d as f64).ln())
            }
        })
        .collect()
}

/// Reweight a raw count matrix to tf-idf: entry (t, d) becomes
/// `count * ln(n_docs / df(t))`. Entries for terms present in every document
/// become zero and are dropped from storage.
pub fn tfidf_weight(x: &TermDocumentMatrix) -> Result<TermDocumentMatrix> {
    if x.weighting() != Weighting::RawCount {
        return Err(Error::InvalidArgument(
            "tf-idf weighting expects a raw count matrix".into(),
        ));
    }
    let df = x.document_frequencies();
    let idf = idf_table(&df, x.n_docs())?;
    let mut triplets = Vec::with_capacity(x.matrix().nnz());
    for (t, d, v) in x.matrix().iter() {
        let w = v * idf[t];
        if w != 0.0 {
            triplets.push((t, d, w));
        }
    }
    let matrix = CscMatrix::from_triplets(x.n_terms(), x.n_docs(), &triplets)?;
    TermDocumentMatrix::new(matrix, Weighting::TfIdf)
}

/// Cosine ranking of every document column against the query.
pub fn rank_vsm(q: &QueryVector, x: &TermDocumentMatrix) -> RankedList {
    assert_eq!(q.len(), x.n_terms(), "query length must match term count");
    let qnorm = q.values().iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut scores = Vec::with_capacity(x.n_docs());
    for d in 0..x.n_docs() {
        let (rows, vals) = x.matrix().col(d);
        let mut dot = 0.0;
        let mut cnorm = 0.0;
        for (&t, &v) in rows.iter().zip(vals) {
            dot += q.values()[t] * v;
            cnorm += v * v;
        }
        let score = if qnorm == 0.0 || cnorm == 0.0 {
            0.0
        } else {
            dot / (qnorm * cnorm.sqrt())
        };
        scores.push(score);
    }
    RankedList::from_scores(0, scores)
}
