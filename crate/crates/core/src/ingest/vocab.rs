//! Vocabulary construction and the term-document count matrix.
//!
//! One pipeline turns text into matrix terms everywhere: tokenize, drop
//! tokens shorter than the minimum length (measured before stemming), stem.
//! Vocabulary admission additionally drops stems present in at least
//! `max_df_frac` of all documents. Queries reuse the same pipeline so they
//! land in the same term space.

use crate::error::{Error, Result};
use crate::ingest::{porter, tokenize, RawDocument};
use crate::linalg::CscMatrix;
use std::collections::{BTreeMap, HashMap};

/// How the stored matrix values are scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Weighting {
    RawCount,
    TfIdf,
}

impl Weighting {
    pub fn name(&self) -> &'static str {
        match self {
            Weighting::RawCount => "count",
            Weighting::TfIdf => "tfidf",
        }
    }
}

/// Stemmed term list with document frequencies and a position index.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    df: Vec<u32>,
    index: HashMap<String, usize>,
    min_token_len: usize,
    max_df_frac: f64,
}

/// Tokenize, apply the pre-stem length filter, and stem.
pub fn text_to_stems(text: &str, min_token_len: usize) -> Vec<String> {
    tokenize::tokenize(text)
        .into_iter()
        .filter(|t| t.len() >= min_token_len)
        .map(|t| porter::stem(&t))
        .collect()
}

/// Build the vocabulary over a document set.
pub fn build_vocabulary(
    docs: &[RawDocument],
    min_token_len: usize,
    max_df_frac: f64,
) -> Result<Vocabulary> {
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if min_token_len < 1 {
        return Err(Error::InvalidArgument(
            "minimum token length must be >= 1".into(),
        ));
    }
    if !(max_df_frac > 0.0 && max_df_frac <= 1.0) {
        return Err(Error::InvalidArgument(
            "max document frequency fraction must lie in (0, 1]".into(),
        ));
    }

    let n_docs = docs.len() as f64;
    let mut df_map: BTreeMap<String, u32> = BTreeMap::new();
    for doc in docs {
        let mut seen: Vec<String> = text_to_stems(&doc.text, min_token_len);
        seen.sort_unstable();
        seen.dedup();
        for stem in seen {
            *df_map.entry(stem).or_insert(0) += 1;
        }
    }

    let mut terms = Vec::new();
    let mut df = Vec::new();
    for (term, count) in df_map {
        // a fraction of exactly 1.0 disables the common-term filter;
        // otherwise stems in at least that share of documents are excluded
        if max_df_frac >= 1.0 || (count as f64) / n_docs < max_df_frac {
            terms.push(term);
            df.push(count);
        }
    }
    let index = terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    Ok(Vocabulary {
        terms,
        df,
        index,
        min_token_len,
        max_df_frac,
    })
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term(&self, position: usize) -> &str {
        &self.terms[position]
    }

    pub fn df(&self) -> &[u32] {
        &self.df
    }

    pub fn position(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn min_token_len(&self) -> usize {
        self.min_token_len
    }

    pub fn max_df_frac(&self) -> f64 {
        self.max_df_frac
    }

    /// In-vocabulary term counts for a piece of text; out-of-vocabulary
    /// stems are dropped.
    pub fn term_counts(&self, text: &str) -> BTreeMap<usize, u32> {
        let mut counts = BTreeMap::new();
        for stem in text_to_stems(text, self.min_token_len) {
            if let Some(pos) = self.position(&stem) {
                *counts.entry(pos).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Binary presence indicators over the whole term space.
    pub fn term_indicators(&self, text: &str) -> Vec<bool> {
        let mut on = vec![false; self.len()];
        for (pos, _) in self.term_counts(text) {
            on[pos] = true;
        }
        on
    }

    /// FNV-1a over the ordered term list; used to pair model artifacts with
    /// the vocabulary they were built from.
    pub fn fingerprint(&self) -> u64 {
        let mut hash: u64 = 0xcbf29ce484222325;
        for term in &self.terms {
            for &byte in term.as_bytes() {
                hash ^= u64::from(byte);
                hash = hash.wrapping_mul(0x100000001b3);
            }
            hash ^= u64::from(b'\n');
            hash = hash.wrapping_mul(0x100000001b3);
        }
        hash
    }

    /// Rebuild from persisted parts.
    pub(crate) fn from_parts(
        terms: Vec<String>,
        df: Vec<u32>,
        min_token_len: usize,
        max_df_frac: f64,
    ) -> Self {
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Self {
            terms,
            df,
            index,
            min_token_len,
            max_df_frac,
        }
    }
}

/// Sparse term-document matrix; rows are vocabulary positions, columns are
/// documents in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct TermDocumentMatrix {
    matrix: CscMatrix,
    weighting: Weighting,
}

impl TermDocumentMatrix {
    pub fn new(matrix: CscMatrix, weighting: Weighting) -> Result<Self> {
        if !matrix.is_finite() || matrix.values().iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidArgument(
                "matrix values must be finite and non-negative".into(),
            ));
        }
        Ok(Self { matrix, weighting })
    }

    pub fn n_terms(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_docs(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn weighting(&self) -> Weighting {
        self.weighting
    }

    pub fn matrix(&self) -> &CscMatrix {
        &self.matrix
    }

    /// Documents containing each term, derived from stored entries.
    pub fn document_frequencies(&self) -> Vec<usize> {
        self.matrix.row_counts()
    }
}

/// Count matrix over the shared pipeline: entry (t, d) is the number of
/// qualifying occurrences of term t in document d.
pub fn build_count_matrix(docs: &[RawDocument], vocab: &Vocabulary) -> TermDocumentMatrix {
    let mut triplets = Vec::new();
    for (d, doc) in docs.iter().enumerate() {
        for (t, count) in vocab.term_counts(&doc.text) {
            triplets.push((t, d, f64::from(count)));
        }
    }
    let matrix = CscMatrix::from_triplets(vocab.len(), docs.len(), &triplets)
        .expect("count triplets are in range");
    TermDocumentMatrix {
        matrix,
        weighting: Weighting::RawCount,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Collection;

    fn doc(id: u32, text: &str) -> RawDocument {
        RawDocument {
            id,
            collection: Collection::Other("test".into()),
            text: text.into(),
        }
    }

    #[test]
    fn common_terms_excluded_by_df() {
        let docs = vec![doc(1, "the cat"), doc(2, "the dog")];
        let vocab = build_vocabulary(&docs, 3, 0.95).unwrap();
        assert_eq!(vocab.terms(), &["cat".to_string(), "dog".to_string()]);
    }

    #[test]
    fn short_tokens_excluded_before_stemming() {
        let docs = vec![doc(1, "a cat")];
        let vocab = build_vocabulary(&docs, 3, 1.0).unwrap();
        assert_eq!(vocab.terms(), &["cat".to_string()]);
    }

    #[test]
    fn surface_length_governs_admission() {
        // "ties" stems to "ti"; the pre-stem length (4) is what counts
        let docs = vec![doc(1, "ties bind"), doc(2, "ropes bind")];
        let vocab = build_vocabulary(&docs, 3, 1.0).unwrap();
        assert!(vocab.position("ti").is_some());
    }

    #[test]
    fn invalid_arguments() {
        let docs = vec![doc(1, "hello")];
        assert!(matches!(
            build_vocabulary(&[], 3, 0.95),
            Err(Error::EmptyCorpus)
        ));
        assert!(build_vocabulary(&docs, 0, 0.95).is_err());
        assert!(build_vocabulary(&docs, 3, 0.0).is_err());
        assert!(build_vocabulary(&docs, 3, 1.5).is_err());
    }

    #[test]
    fn exclusion_rules_hold_exhaustively() {
        let docs = vec![
            doc(1, "wing slipstream lift wing"),
            doc(2, "wing propeller slipstream"),
            doc(3, "wing lift theory"),
        ];
        let min_len = 4;
        let max_df = 0.9;
        let vocab = build_vocabulary(&docs, min_len, max_df).unwrap();
        // every admitted term comes from a long-enough surface token and
        // sits under the df ceiling
        for (i, term) in vocab.terms().iter().enumerate() {
            let df = vocab.df()[i] as f64 / docs.len() as f64;
            assert!(df < max_df, "term {term} too common");
        }
        // "wing" occurs in 3/3 docs: excluded; "lift" in 2/3: kept
        assert!(vocab.position("wing").is_none());
        assert!(vocab.position("lift").is_some());
        // lexicographic order
        let mut sorted = vocab.terms().to_vec();
        sorted.sort();
        assert_eq!(vocab.terms(), sorted.as_slice());
    }

    #[test]
    fn count_matrix_columns_match_documents() {
        let docs = vec![doc(1, "cat cat dog"), doc(2, "dog mouse")];
        let vocab = build_vocabulary(&docs, 3, 1.0).unwrap();
        let tdm = build_count_matrix(&docs, &vocab);
        assert_eq!(tdm.weighting(), Weighting::RawCount);
        let cat = vocab.position("cat").unwrap();
        let dog = vocab.position("dog").unwrap();
        let mouse = vocab.position("mous").unwrap();
        let dense = tdm.matrix().to_dense();
        assert_eq!(dense[(cat, 0)], 2.0);
        assert_eq!(dense[(dog, 0)], 1.0);
        assert_eq!(dense[(mouse, 0)], 0.0);
        assert_eq!(dense[(dog, 1)], 1.0);
        assert_eq!(dense[(mouse, 1)], 1.0);
        // absent terms have no stored entry
        assert_eq!(tdm.matrix().nnz(), 4);
    }

    #[test]
    fn row_sums_match_recount_oracle() {
        let docs = vec![
            doc(1, "alpha beta beta gamma"),
            doc(2, "beta gamma gamma gamma"),
            doc(3, "alpha alpha delta"),
        ];
        let vocab = build_vocabulary(&docs, 3, 1.0).unwrap();
        let tdm = build_count_matrix(&docs, &vocab);
        // oracle: count stem occurrences by a direct linear scan
        let mut expected = vec![0.0; vocab.len()];
        for d in &docs {
            for stem in text_to_stems(&d.text, 3) {
                if let Some(pos) = vocab.position(&stem) {
                    expected[pos] += 1.0;
                }
            }
        }
        let mut row_sums = vec![0.0; vocab.len()];
        for (r, _, v) in tdm.matrix().iter() {
            row_sums[r] += v;
        }
        assert_eq!(row_sums, expected);
    }

    #[test]
    fn fingerprint_tracks_term_list() {
        let docs = vec![doc(1, "cat dog"), doc(2, "cat bird")];
        let v1 = build_vocabulary(&docs, 3, 1.0).unwrap();
        let v2 = build_vocabulary(&docs, 3, 1.0).unwrap();
        assert_eq!(v1.fingerprint(), v2.fingerprint());
        let other = build_vocabulary(&[doc(1, "cat dog")], 3, 1.0).unwrap();
        assert_ne!(v1.fingerprint(), other.fingerprint());
    }

    #[test]
    fn query_pipeline_matches_document_pipeline() {
        let docs = vec![doc(1, "running quickly"), doc(2, "slower walks")];
        let vocab = build_vocabulary(&docs, 3, 1.0).unwrap();
        let counts = vocab.term_counts("Running, RUNNING! unknownterm");
        let run = vocab.position("run").unwrap();
        assert_eq!(counts.get(&run), Some(&2));
        assert_eq!(counts.len(), 1);
        let indicators = vocab.term_indicators("running");
        assert!(indicators[run]);
        assert_eq!(indicators.iter().filter(|&&b| b).count(), 1);
    }
}
