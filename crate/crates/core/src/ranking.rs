//! Ranked result lists shared by every model.

/// One scored document.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredDoc {
    pub doc: u32,
    pub score: f64,
}

/// Documents ordered by descending score; equal scores order by ascending
/// document id so rankings are fully deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    pub query_id: u32,
    entries: Vec<ScoredDoc>,
}

impl RankedList {
    /// Rank every document of a score vector (document id = position).
    pub fn from_scores(query_id: u32, scores: Vec<f64>) -> Self {
        debug_assert!(scores.iter().all(|s| s.is_finite()), "scores must be finite");
        let mut entries: Vec<ScoredDoc> = scores
            .into_iter()
            .enumerate()
            .map(|(doc, score)| ScoredDoc {
                doc: doc as u32,
                score,
            })
            .collect();
        entries.sort_unstable_by(|a, b| b.score.total_cmp(&a.score).then(a.doc.cmp(&b.doc)));
        Self { query_id, entries }
    }

    pub fn entries(&self) -> &[ScoredDoc] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Keep only the best `n` entries.
    pub fn truncated(mut self, n: usize) -> Self {
        self.entries.truncate(n);
        self
    }

    /// Document ids in rank order.
    pub fn doc_order(&self) -> Vec<u32> {
        self.entries.iter().map(|e| e.doc).collect()
    }

    /// Apply a strictly monotone map to every score; the ordering is
    /// unchanged by construction.
    pub fn map_scores(mut self, f: impl Fn(f64) -> f64) -> Self {
        for e in &mut self.entries {
            e.score = f(e.score);
        }
        self
    }
}
