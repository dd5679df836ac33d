//! Binary term-document random field: energy over single and pairwise
//! cliques, the closed-form local document probability, an enumeration
//! oracle for validating it, and parameter learning by rank-limited
//! pseudoinverse of the augmented observation matrix.

use crate::error::{Error, Result};
use crate::ingest::TermDocumentMatrix;
use crate::linalg::{frobenius_norm, gemm, svd_truncated_with, CscMatrix, SvdOptions};
use crate::ranking::RankedList;
use nalgebra::DMatrix;

/// Logistic function. Output is strictly inside (0, 1) for any argument the
/// f64 exponential can resolve.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// One joint assignment of all binary term and document variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MrfConfiguration {
    pub terms: Vec<bool>,
    pub docs: Vec<bool>,
}

impl MrfConfiguration {
    pub fn new(terms: Vec<bool>, docs: Vec<bool>) -> Self {
        Self { terms, docs }
    }

    pub fn zeros(n_terms: usize, n_docs: usize) -> Self {
        Self {
            terms: vec![false; n_terms],
            docs: vec![false; n_docs],
        }
    }
}

/// Document-term pair weights, either materialized row-per-document or kept
/// in the truncated factor form the learning step produces. The factored
/// form represents `W = V diag(1/sigma) U_t^T` without allocating the full
/// documents-by-terms matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum DocTermWeights {
    Dense(DMatrix<f64>),
    Factored {
        v: DMatrix<f64>,
        sigma: Vec<f64>,
        u_terms: DMatrix<f64>,
    },
}

/// Term biases, document biases, and the pair weight matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MrfParameters {
    term_bias: Vec<f64>,
    doc_bias: Vec<f64>,
    weights: DocTermWeights,
}

impl MrfParameters {
    /// Build from explicit dense parts; `weights` has one row per document.
    pub fn from_dense(
        term_bias: Vec<f64>,
        doc_bias: Vec<f64>,
        weights: DMatrix<f64>,
    ) -> Result<Self> {
        if weights.nrows() != doc_bias.len() || weights.ncols() != term_bias.len() {
            return Err(Error::DimensionMismatch(format!(
                "weights {}x{} do not match {} docs / {} terms",
                weights.nrows(),
                weights.ncols(),
                doc_bias.len(),
                term_bias.len()
            )));
        }
        let finite = term_bias.iter().chain(&doc_bias).all(|v| v.is_finite())
            && weights.iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidArgument(
                "parameters must be finite".into(),
            ));
        }
        Ok(Self {
            term_bias,
            doc_bias,
            weights: DocTermWeights::Dense(weights),
        })
    }

    pub(crate) fn from_factored(
        doc_bias: Vec<f64>,
        v: DMatrix<f64>,
        sigma: Vec<f64>,
        u_terms: DMatrix<f64>,
    ) -> Self {
        let term_bias = vec![0.0; u_terms.nrows()];
        Self {
            term_bias,
            doc_bias,
            weights: DocTermWeights::Factored { v, sigma, u_terms },
        }
    }

    pub fn n_terms(&self) -> usize {
        self.term_bias.len()
    }

    pub fn n_docs(&self) -> usize {
        self.doc_bias.len()
    }

    pub fn term_bias(&self) -> &[f64] {
        &self.term_bias
    }

    pub fn doc_bias(&self) -> &[f64] {
        &self.doc_bias
    }

    pub fn weights(&self) -> &DocTermWeights {
        &self.weights
    }

    /// Retained rank of the factored form, if any.
    pub fn factored_rank(&self) -> Option<usize> {
        match &self.weights {
            DocTermWeights::Dense(_) => None,
            DocTermWeights::Factored { sigma, .. } => Some(sigma.len()),
        }
    }

    /// Materialize the full documents-by-terms weight matrix.
    pub fn dense_weights(&self) -> DMatrix<f64> {
        match &self.weights {
            DocTermWeights::Dense(w) => w.clone(),
            DocTermWeights::Factored { v, sigma, u_terms } => {
                if sigma.is_empty() {
                    return DMatrix::zeros(self.n_docs(), self.n_terms());
                }
                let mut v_scaled = v.clone();
                for (j, &s) in sigma.iter().enumerate() {
                    v_scaled.column_mut(j).scale_mut(1.0 / s);
                }
                gemm(&v_scaled, &u_terms.transpose())
            }
        }
    }

    /// Project active terms through the factored form: `(U_t^T T) / sigma`.
    fn factored_projection(
        sigma: &[f64],
        u_terms: &DMatrix<f64>,
        terms: &[bool],
    ) -> Vec<f64> {
        let k = sigma.len();
        let mut z = vec![0.0; k];
        for (t, &on) in terms.iter().enumerate() {
            if on {
                for (j, zj) in z.iter_mut().enumerate() {
                    *zj += u_terms[(t, j)];
                }
            }
        }
        for (j, zj) in z.iter_mut().enumerate() {
            *zj /= sigma[j];
        }
        z
    }

    /// Pair-clique contribution of document `i` against the active terms.
    fn weight_row_dot(&self, i: usize, terms: &[bool]) -> f64 {
        match &self.weights {
            DocTermWeights::Dense(w) => terms
                .iter()
                .enumerate()
                .filter(|(_, &on)| on)
                .map(|(t, _)| w[(i, t)])
                .sum(),
            DocTermWeights::Factored { v, sigma, u_terms } => {
                let z = Self::factored_projection(sigma, u_terms, terms);
                (0..sigma.len()).map(|j| v[(i, j)] * z[j]).sum()
            }
        }
    }

    /// `g_i + W_i . T` for every document at once. The factored path walks
    /// the right factor column by column for contiguous access.
    pub fn activation_scores(&self, terms: &[bool]) -> Vec<f64> {
        assert_eq!(terms.len(), self.n_terms(), "term vector length");
        match &self.weights {
            DocTermWeights::Dense(w) => (0..self.n_docs())
                .map(|i| {
                    self.doc_bias[i]
                        + terms
                            .iter()
                            .enumerate()
                            .filter(|(_, &on)| on)
                            .map(|(t, _)| w[(i, t)])
                            .sum::<f64>()
                })
                .collect(),
            DocTermWeights::Factored { v, sigma, u_terms } => {
                let z = Self::factored_projection(sigma, u_terms, terms);
                let m = self.n_docs();
                let mut scores = self.doc_bias.clone();
                let vs = v.as_slice();
                for (j, &zj) in z.iter().enumerate() {
                    if zj != 0.0 {
                        let col = &vs[j * m..(j + 1) * m];
                        for (score, &value) in scores.iter_mut().zip(col) {
                            *score += value * zj;
                        }
                    }
                }
                scores
            }
        }
    }
}

fn check_dims(cfg: &MrfConfiguration, p: &MrfParameters) -> Result<()> {
    if cfg.terms.len() != p.n_terms() || cfg.docs.len() != p.n_docs() {
        return Err(Error::DimensionMismatch(format!(
            "configuration {}x{} vs parameters {}x{}",
            cfg.terms.len(),
            cfg.docs.len(),
            p.n_terms(),
            p.n_docs()
        )));
    }
    Ok(())
}

/// Total clique compatibility of a configuration: term biases of active
/// terms, document biases of active documents, and pair weights of active
/// term-document pairs. Higher means more compatible.
pub fn energy(cfg: &MrfConfiguration, p: &MrfParameters) -> Result<f64> {
    check_dims(cfg, p)?;
    let term_part: f64 = cfg
        .terms
        .iter()
        .enumerate()
        .filter(|(_, &on)| on)
        .map(|(t, _)| p.term_bias[t])
        .sum();
    let doc_part: f64 = cfg
        .docs
        .iter()
        .enumerate()
        .filter(|(_, &on)| on)
        .map(|(d, _)| p.doc_bias[d])
        .sum();
    let pair_part: f64 = cfg
        .docs
        .iter()
        .enumerate()
        .filter(|(_, &on)| on)
        .map(|(d, _)| p.weight_row_dot(d, &cfg.terms))
        .sum();
    Ok(term_part + doc_part + pair_part)
}

/// Numerator of the joint distribution: `exp(energy)`. The normalizer is
/// never computed; use [`log_joint_ratio`] when comparing configurations
/// whose energies might overflow the exponential.
pub fn joint_unnormalized(cfg: &MrfConfiguration, p: &MrfParameters) -> Result<f64> {
    Ok(energy(cfg, p)?.exp())
}

/// `ln(joint(a) / joint(b))`, computed without either exponential.
pub fn log_joint_ratio(
    a: &MrfConfiguration,
    b: &MrfConfiguration,
    p: &MrfParameters,
) -> Result<f64> {
    Ok(energy(a, p)? - energy(b, p)?)
}

/// Closed-form local probability that document `i` is on given the term
/// assignment: the logistic of the document bias plus the pair weights of
/// the active terms. Every other variable's parameters cancel out.
pub fn local_doc_probability(i: usize, terms: &[bool], p: &MrfParameters) -> f64 {
    assert!(i < p.n_docs(), "document index out of range");
    assert_eq!(terms.len(), p.n_terms(), "term vector length");
    sigmoid(p.doc_bias[i] + p.weight_row_dot(i, terms))
}

/// Enumeration oracle for the same probability: evaluate the unnormalized
/// joint with document `i` clamped on and off, all other variables fixed,
/// and take the ratio. Only feasible on small instances.
pub fn gibbs_oracle(i: usize, clamped: &MrfConfiguration, p: &MrfParameters) -> Result<f64> {
    if i >= p.n_docs() {
        return Err(Error::InvalidArgument(format!(
            "document index {i} out of range"
        )));
    }
    let mut on = clamped.clone();
    on.docs[i] = true;
    let mut off = clamped.clone();
    off.docs[i] = false;
    let joint_on = joint_unnormalized(&on, p)?;
    let joint_off = joint_unnormalized(&off, p)?;
    Ok(joint_on / (joint_on + joint_off))
}

/// Observation matrix for learning: term vectors as columns with a trailing
/// always-on row that absorbs the document biases.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningInput {
    t_hat: CscMatrix,
}

impl LearningInput {
    /// Augment a term-document matrix with the all-ones row.
    pub fn from_matrix(x: &TermDocumentMatrix) -> Self {
        let n = x.n_terms();
        let m = x.n_docs();
        let mut triplets: Vec<(usize, usize, f64)> = x.matrix().iter().collect();
        for d in 0..m {
            triplets.push((n, d, 1.0));
        }
        let t_hat = CscMatrix::from_triplets(n + 1, m, &triplets)
            .expect("augmented triplets stay in range");
        Self { t_hat }
    }

    /// Validate and wrap an explicit augmented matrix.
    pub fn from_dense(t_hat: &DMatrix<f64>) -> Result<Self> {
        if t_hat.nrows() < 1 {
            return Err(Error::InvalidArgument(
                "observation matrix needs the always-on row".into(),
            ));
        }
        let n = t_hat.nrows() - 1;
        for c in 0..t_hat.ncols() {
            if t_hat[(n, c)] != 1.0 {
                return Err(Error::InvalidArgument(
                    "last observation row must be all ones".into(),
                ));
            }
            for r in 0..n {
                let v = t_hat[(r, c)];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidArgument(
                        "observation values must be finite and non-negative".into(),
                    ));
                }
            }
        }
        Ok(Self {
            t_hat: CscMatrix::from_dense(t_hat),
        })
    }

    /// Term count (excluding the augmentation row).
    pub fn n_terms(&self) -> usize {
        self.t_hat.nrows() - 1
    }

    pub fn n_observations(&self) -> usize {
        self.t_hat.ncols()
    }

    pub fn matrix(&self) -> &CscMatrix {
        &self.t_hat
    }
}

/// Learn `[W g]` as the rank-k pseudoinverse of the observation matrix. The
/// last pseudoinverse column becomes the document biases; term biases are
/// fixed at zero since they cancel out of document ranking.
pub fn learn_parameters(input: &LearningInput, k: usize) -> Result<MrfParameters> {
    learn_parameters_with(input, k, &SvdOptions::default())
}

pub fn learn_parameters_with(
    input: &LearningInput,
    k: usize,
    opts: &SvdOptions,
) -> Result<MrfParameters> {
    let factors = svd_truncated_with((&input.t_hat).into(), k, opts)?;
    parameters_from_factors(&factors, input.n_terms())
}

/// Assemble parameters from already-computed factors of the augmented
/// observation matrix; rank sweeps reuse one factorization this way.
pub fn parameters_from_factors(
    factors: &crate::linalg::SvdFactors,
    n_terms: usize,
) -> Result<MrfParameters> {
    if factors.nrows() != n_terms + 1 {
        return Err(Error::DimensionMismatch(format!(
            "factors cover {} rows but the observation matrix has {} terms plus the ones row",
            factors.nrows(),
            n_terms
        )));
    }
    let m = factors.ncols();
    let u = factors.u(); // (n_terms+1) x kept
    let v = factors.v(); // m x kept
    let u_terms = u.rows(0, n_terms).into_owned();
    let mut doc_bias = vec![0.0; m];
    for (j, &s) in factors.sigma().iter().enumerate() {
        let coeff = u[(n_terms, j)] / s;
        for (i, bias) in doc_bias.iter_mut().enumerate() {
            *bias += v[(i, j)] * coeff;
        }
    }
    Ok(MrfParameters::from_factored(
        doc_bias,
        v.clone(),
        factors.sigma().to_vec(),
        u_terms,
    ))
}

/// Frobenius norm of `I - [W g] T_hat`: the residual of predicting each
/// observation's identity from its term vector.
pub fn evaluate_objective(p: &MrfParameters, input: &LearningInput) -> Result<f64> {
    let m = input.n_observations();
    if p.n_terms() != input.n_terms() || p.n_docs() != m {
        return Err(Error::DimensionMismatch(
            "parameters do not match observation matrix".into(),
        ));
    }
    // [W g] as one m x (n+1) matrix
    let w = p.dense_weights();
    let mut wg = DMatrix::zeros(m, p.n_terms() + 1);
    wg.view_mut((0, 0), (m, p.n_terms())).copy_from(&w);
    for i in 0..m {
        wg[(i, p.n_terms())] = p.doc_bias[i];
    }
    // (T_hat^T [W g]^T)^T = [W g] T_hat
    let product = input.t_hat.tr_mul_dense(&wg.transpose()).transpose();
    let mut residual = -product;
    for i in 0..m {
        residual[(i, i)] += 1.0;
    }
    Ok(frobenius_norm(&residual))
}

/// Rank all documents for a binary query term vector by descending
/// activation `g_i + W_i . T`. Applying the logistic to the scores yields
/// the local probabilities and leaves the ordering unchanged.
pub fn rank_mrf(terms: &[bool], p: &MrfParameters) -> RankedList {
    RankedList::from_scores(0, p.activation_scores(terms))
}
