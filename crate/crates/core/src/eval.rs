//! Retrieval metrics: average precision over full rankings, mean average
//! precision, and 11-point interpolated precision-recall curves.

use crate::error::{Error, Result};
use crate::ingest::{Collection, QrelSet};
use crate::ranking::RankedList;
use serde::{Deserialize, Serialize};

/// Recall levels of the interpolated curve.
pub const RECALL_POINTS: [f64; 11] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

/// Interpolated precision at the 11 standard recall levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrCurve {
    points: [(f64, f64); 11],
}

impl PrCurve {
    pub fn points(&self) -> &[(f64, f64); 11] {
        &self.points
    }

    /// Pointwise mean over a query set.
    pub fn mean(curves: &[PrCurve]) -> Option<PrCurve> {
        if curves.is_empty() {
            return None;
        }
        let mut points = RECALL_POINTS.map(|r| (r, 0.0));
        for curve in curves {
            for (i, &(_, p)) in curve.points.iter().enumerate() {
                points[i].1 += p;
            }
        }
        for point in &mut points {
            point.1 /= curves.len() as f64;
        }
        Some(PrCurve { points })
    }
}

/// Outcome of evaluating one query.
#[derive(Debug, Clone, PartialEq)]
pub enum QueryEval {
    /// The query had at least one relevant document.
    Scored { ap: f64, curve: PrCurve },
    /// No relevant documents are known; the query is skipped.
    Skipped,
}

/// Non-interpolated average precision of a ranking against binary
/// judgments: mean of precision-at-rank over the ranks holding relevant
/// documents, normalized by the total number of relevant documents.
/// Returns `None` when the query has no relevant documents.
pub fn average_precision(ranked: &RankedList, qrels: &QrelSet, query_id: u32) -> Option<f64> {
    let total_relevant = qrels.relevant_count(query_id);
    if total_relevant == 0 {
        return None;
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (idx, entry) in ranked.entries().iter().enumerate() {
        if qrels.contains(query_id, entry.doc) {
            hits += 1;
            sum += hits as f64 / (idx + 1) as f64;
        }
    }
    Some(sum / total_relevant as f64)
}

/// Arithmetic mean of per-query average precision values.
pub fn mean_average_precision(per_query: &[f64]) -> Result<f64> {
    if per_query.is_empty() {
        return Err(Error::InvalidArgument(
            "mean average precision over an empty query set".into(),
        ));
    }
    Ok(per_query.iter().sum::<f64>() / per_query.len() as f64)
}

/// 11-point interpolated precision-recall curve: at each recall level the
/// precision is the maximum achieved at any rank with recall at or above
/// that level.
pub fn pr_curve(ranked: &RankedList, qrels: &QrelSet, query_id: u32) -> Option<PrCurve> {
    let total_relevant = qrels.relevant_count(query_id);
    if total_relevant == 0 {
        return None;
    }
    // (recall, precision) at each rank where a relevant document appears
    let mut hits = 0usize;
    let mut steps: Vec<(f64, f64)> = Vec::with_capacity(total_relevant);
    for (idx, entry) in ranked.entries().iter().enumerate() {
        if qrels.contains(query_id, entry.doc) {
            hits += 1;
            steps.push((
                hits as f64 / total_relevant as f64,
                hits as f64 / (idx + 1) as f64,
            ));
        }
    }
    let points = RECALL_POINTS.map(|level| {
        let best = steps
            .iter()
            .filter(|(recall, _)| *recall >= level - 1e-12)
            .map(|&(_, precision)| precision)
            .fold(0.0f64, f64::max);
        (level, best)
    });
    Some(PrCurve { points })
}

/// Evaluate one query: AP and interpolated curve, or a skip marker.
pub fn evaluate_query(ranked: &RankedList, qrels: &QrelSet, query_id: u32) -> QueryEval {
    match (
        average_precision(ranked, qrels, query_id),
        pr_curve(ranked, qrels, query_id),
    ) {
        (Some(ap), Some(curve)) => QueryEval::Scored { ap, curve },
        _ => QueryEval::Skipped,
    }
}

/// Which ranking model produced a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Vsm,
    Lsa,
    Mrf,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Vsm => "vsm",
            ModelKind::Lsa => "lsa",
            ModelKind::Mrf => "mrf",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vsm" => Ok(ModelKind::Vsm),
            "lsa" => Ok(ModelKind::Lsa),
            "mrf" => Ok(ModelKind::Mrf),
            other => Err(Error::InvalidArgument(format!("unknown model {other:?}"))),
        }
    }
}

/// Mean average precision per retained rank for one (model, collection)
/// pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub model: ModelKind,
    pub collection: Collection,
    /// (k, map) rows with strictly increasing k.
    pub rows: Vec<(usize, f64)>,
}

/// A rank value whose model build failed during a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepFailure {
    pub k: usize,
    pub message: String,
}
