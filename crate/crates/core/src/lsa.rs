//! Latent semantic analysis: rank-k index over the weighted term-document
//! matrix, query folding into the latent space, cosine ranking against the
//! latent document vectors, and the latent document/term similarity
//! products.

use crate::error::{Error, Result};
use crate::ingest::{TermDocumentMatrix, Weighting};
use crate::linalg::{gemm, svd_truncated_with, SvdFactors, SvdOptions};
use crate::ranking::RankedList;
use crate::vsm::QueryVector;
use nalgebra::DMatrix;

/// Which vectors represent documents during latent ranking: plain right
/// singular vectors, or right vectors scaled by the singular values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum LatentSpace {
    #[default]
    RightVectors,
    ScaledRightVectors,
}

/// Truncated factors of the weighted matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LsaIndex {
    factors: SvdFactors,
}

/// A query folded into the latent space.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentQuery {
    values: Vec<f64>,
}

impl LatentQuery {
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

pub fn build_lsa_index(x: &TermDocumentMatrix, k: usize) -> Result<LsaIndex> {
    build_lsa_index_with(x, k, &SvdOptions::default())
}

pub fn build_lsa_index_with(
    x: &TermDocumentMatrix,
    k: usize,
    opts: &SvdOptions,
) -> Result<LsaIndex> {
    if x.weighting() != Weighting::TfIdf {
        return Err(Error::InvalidArgument(
            "latent index expects a tf-idf weighted matrix".into(),
        ));
    }
    let factors = svd_truncated_with(x.matrix().into(), k, opts)?;
    Ok(LsaIndex { factors })
}

impl LsaIndex {
    pub fn from_factors(factors: SvdFactors) -> Self {
        Self { factors }
    }

    /// Effective retained rank (may be below the requested rank when the
    /// matrix ran out of significant singular values).
    pub fn k(&self) -> usize {
        self.factors.k()
    }

    pub fn factors(&self) -> &SvdFactors {
        &self.factors
    }

    /// Cheap rank reduction reusing the already-computed factors.
    pub fn truncated(&self, k: usize) -> LsaIndex {
        LsaIndex {
            factors: self.factors.truncated(k),
        }
    }
}

/// Project a term-space query into the latent space: the query vector times
/// the left singular vectors, rescaled by the reciprocal singular values.
pub fn fold_query(q: &QueryVector, idx: &LsaIndex) -> LatentQuery {
    assert_eq!(
        q.len(),
        idx.factors.nrows(),
        "query length must match term count"
    );
    let u = idx.factors.u();
    let mut values = vec![0.0; idx.k()];
    for (t, weight) in q.nonzero() {
        for (j, value) in values.iter_mut().enumerate() {
            *value += u[(t, j)] * weight;
        }
    }
    for (j, value) in values.iter_mut().enumerate() {
        *value /= idx.factors.sigma()[j];
    }
    LatentQuery { values }
}

/// Cosine ranking of latent documents against the folded query. Walks the
/// right factor column by column so the memory access stays contiguous.
pub fn rank_lsa(q: &QueryVector, idx: &LsaIndex, space: LatentSpace) -> RankedList {
    let folded = fold_query(q, idx);
    let m = idx.factors.ncols();
    let k = idx.k();
    let v = idx.factors.v().as_slice();
    let query_norm2: f64 = folded.values().iter().map(|x| x * x).sum();

    let mut dots = vec![0.0; m];
    let mut norms2 = vec![0.0; m];
    for j in 0..k {
        let scale = match space {
            LatentSpace::RightVectors => 1.0,
            LatentSpace::ScaledRightVectors => idx.factors.sigma()[j],
        };
        let qj = folded.values()[j];
        let col = &v[j * m..(j + 1) * m];
        for (d, &value) in col.iter().enumerate() {
            let scaled = value * scale;
            dots[d] += scaled * qj;
            norms2[d] += scaled * scaled;
        }
    }
    let scores = dots
        .into_iter()
        .zip(norms2)
        .map(|(dot, norm2)| {
            if norm2 == 0.0 || query_norm2 == 0.0 {
                0.0
            } else {
                dot / (norm2.sqrt() * query_norm2.sqrt())
            }
        })
        .collect();
    RankedList::from_scores(0, scores)
}

/// All-pairs document inner products in the latent space:
/// `(V_k S_k)(V_k S_k)^T`. At full rank this equals the Gram matrix of the
/// original document columns.
pub fn doc_similarity(idx: &LsaIndex) -> DMatrix<f64> {
    scaled_self_product(idx.factors.v(), idx.factors.sigma())
}

/// All-pairs term inner products: `(U_k S_k)(U_k S_k)^T`.
pub fn term_similarity(idx: &LsaIndex) -> DMatrix<f64> {
    scaled_self_product(idx.factors.u(), idx.factors.sigma())
}

fn scaled_self_product(basis: &DMatrix<f64>, sigma: &[f64]) -> DMatrix<f64> {
    if sigma.is_empty() {
        return DMatrix::zeros(basis.nrows(), basis.nrows());
    }
    let mut scaled = basis.clone();
    for (j, &s) in sigma.iter().enumerate() {
        scaled.column_mut(j).scale_mut(s);
    }
    gemm(&scaled, &scaled.transpose())
}
