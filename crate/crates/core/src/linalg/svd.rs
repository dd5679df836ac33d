//! Truncated singular value decomposition over dense or sparse inputs.
//!
//! Small inputs go through nalgebra's dense SVD. Larger inputs use seeded
//! randomized subspace iteration: project onto a Gaussian sketch, refine
//! with power iterations (re-orthonormalizing each half step), then run a
//! dense SVD on the projected matrix. Both paths land in the same
//! [`SvdFactors`] contract.

use crate::error::{Error, Result};
use crate::linalg::dense::{self, gemm, gram};
use crate::linalg::sparse::CscMatrix;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Singular values at or below `RELATIVE_DROP_TOL * sigma_max` are discarded
/// so reciprocal scaling never divides by a numerically-zero value.
pub const RELATIVE_DROP_TOL: f64 = 1e-10;

/// Frobenius bound used to validate factor orthonormality.
pub const ORTHONORMALITY_TOL: f64 = 1e-8;

/// Borrowed view over either matrix representation.
#[derive(Clone, Copy)]
pub enum MatrixRef<'a> {
    Dense(&'a DMatrix<f64>),
    Sparse(&'a CscMatrix),
}

impl<'a> From<&'a DMatrix<f64>> for MatrixRef<'a> {
    fn from(a: &'a DMatrix<f64>) -> Self {
        MatrixRef::Dense(a)
    }
}

impl<'a> From<&'a CscMatrix> for MatrixRef<'a> {
    fn from(a: &'a CscMatrix) -> Self {
        MatrixRef::Sparse(a)
    }
}

impl MatrixRef<'_> {
    pub fn nrows(&self) -> usize {
        match self {
            MatrixRef::Dense(a) => a.nrows(),
            MatrixRef::Sparse(a) => a.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            MatrixRef::Dense(a) => a.ncols(),
            MatrixRef::Sparse(a) => a.ncols(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            MatrixRef::Dense(a) => a.iter().all(|v| v.is_finite()),
            MatrixRef::Sparse(a) => a.is_finite(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            MatrixRef::Dense(a) => (*a).clone(),
            MatrixRef::Sparse(a) => a.to_dense(),
        }
    }

    pub fn mul_dense(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            MatrixRef::Dense(a) => gemm(a, b),
            MatrixRef::Sparse(a) => a.mul_dense(b),
        }
    }

    pub fn tr_mul_dense(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            MatrixRef::Dense(a) => gemm(&a.transpose(), b),
            MatrixRef::Sparse(a) => a.tr_mul_dense(b),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        match self {
            MatrixRef::Dense(a) => dense::frobenius_norm(a),
            MatrixRef::Sparse(a) => a.frobenius_norm(),
        }
    }
}

/// Truncated factors `U_k`, descending positive singular values, `V_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdFactors {
    u: DMatrix<f64>,
    sigma: Vec<f64>,
    v: DMatrix<f64>,
}

impl SvdFactors {
    /// Validate the factor invariants: descending strictly positive singular
    /// values, orthonormal columns within [`ORTHONORMALITY_TOL`], and
    /// `k <= min(rows, cols)`.
    pub fn new(u: DMatrix<f64>, sigma: Vec<f64>, v: DMatrix<f64>) -> Result<Self> {
        let k = sigma.len();
        if u.ncols() != k || v.ncols() != k {
            return Err(Error::DimensionMismatch(format!(
                "factor widths {} / {} do not match {} singular values",
                u.ncols(),
                v.ncols(),
                k
            )));
        }
        if k > u.nrows().min(v.nrows()) {
            return Err(Error::InvalidArgument(format!(
                "rank {k} exceeds min dimension {}",
                u.nrows().min(v.nrows())
            )));
        }
        for w in sigma.windows(2) {
            if w[1] > w[0] {
                return Err(Error::Inconsistency(
                    "singular values not sorted descending".into(),
                ));
            }
        }
        if sigma.iter().any(|s| *s <= 0.0 || !s.is_finite()) {
            return Err(Error::Inconsistency(
                "singular values must be strictly positive and finite".into(),
            ));
        }
        for (name, f) in [("U", &u), ("V", &v)] {
            let mut g = gram(f);
            for i in 0..k {
                g[(i, i)] -= 1.0;
            }
            let dev = dense::frobenius_norm(&g);
            if dev >= ORTHONORMALITY_TOL {
                return Err(Error::Numerical(format!(
                    "{name} columns deviate from orthonormality by {dev:.3e}"
                )));
            }
        }
        Ok(Self { u, sigma, v })
    }

    /// Retained rank.
    pub fn k(&self) -> usize {
        self.sigma.len()
    }

    pub fn nrows(&self) -> usize {
        self.u.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.v.nrows()
    }

    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    /// Keep only the leading `k` triplets. Requesting more than is stored
    /// returns a copy of everything.
    pub fn truncated(&self, k: usize) -> SvdFactors {
        let k = k.min(self.k());
        SvdFactors {
            u: self.u.columns(0, k).into_owned(),
            sigma: self.sigma[..k].to_vec(),
            v: self.v.columns(0, k).into_owned(),
        }
    }

    /// `U_k diag(sigma) V_k^T`; the zero matrix when no triplets are kept.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        if self.k() == 0 {
            return DMatrix::zeros(self.nrows(), self.ncols());
        }
        let mut us = self.u.clone();
        for (j, &s) in self.sigma.iter().enumerate() {
            us.column_mut(j).scale_mut(s);
        }
        gemm(&us, &self.v.transpose())
    }

    /// Frobenius norm of `A - reconstruct()`.
    pub fn reconstruction_error(&self, a: MatrixRef<'_>) -> f64 {
        let mut diff = self.reconstruct();
        match a {
            MatrixRef::Dense(d) => diff -= d,
            MatrixRef::Sparse(s) => {
                for (r, c, v) in s.iter() {
                    diff[(r, c)] -= v;
                }
            }
        }
        dense::frobenius_norm(&diff)
    }
}

/// Tuning knobs for the decomposition. `seed` fixes the Gaussian sketch so
/// repeated runs are bitwise identical.
#[derive(Debug, Clone)]
pub struct SvdOptions {
    /// Extra sketch columns beyond the requested rank.
    pub oversample: usize,
    /// Power iterations refining the sketched range.
    pub power_iterations: usize,
    pub seed: u64,
    /// Inputs whose smaller dimension is at or below this go dense.
    pub dense_cutoff: usize,
}

impl Default for SvdOptions {
    fn default() -> Self {
        Self {
            oversample: 10,
            power_iterations: 3,
            seed: 7,
            dense_cutoff: 400,
        }
    }
}

/// Top-`min(k, effective rank)` singular triplets of `a`.
pub fn svd_truncated(a: MatrixRef<'_>, k: usize) -> Result<SvdFactors> {
    svd_truncated_with(a, k, &SvdOptions::default())
}

pub fn svd_truncated_with(a: MatrixRef<'_>, k: usize, opts: &SvdOptions) -> Result<SvdFactors> {
    if k < 1 {
        return Err(Error::InvalidArgument("requested rank must be >= 1".into()));
    }
    if !a.is_finite() {
        return Err(Error::InvalidArgument(
            "matrix entries must be finite".into(),
        ));
    }
    let min_dim = a.nrows().min(a.ncols());
    if min_dim == 0 {
        return SvdFactors::new(
            DMatrix::zeros(a.nrows(), 0),
            Vec::new(),
            DMatrix::zeros(a.ncols(), 0),
        );
    }
    if min_dim <= opts.dense_cutoff || k + opts.oversample >= min_dim {
        dense_truncated(a.to_dense(), k)
    } else {
        randomized_truncated(a, k, opts)
    }
}

fn dense_truncated(a: DMatrix<f64>, k: usize) -> Result<SvdFactors> {
    let (nrows, ncols) = (a.nrows(), a.ncols());
    let svd = a
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("dense SVD did not converge".into()))?;
    let u = svd.u.expect("u requested");
    let v = svd.v_t.expect("v requested").transpose();
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    assemble(u, sigma, v, k, nrows, ncols)
}

fn randomized_truncated(a: MatrixRef<'_>, k: usize, opts: &SvdOptions) -> Result<SvdFactors> {
    let min_dim = a.nrows().min(a.ncols());
    let sketch = (k + opts.oversample).min(min_dim);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let normal = StandardNormal;
    let omega = DMatrix::from_fn(a.ncols(), sketch, |_, _| normal.sample(&mut rng));

    let mut q = orthonormalize(a.mul_dense(&omega))?;
    for _ in 0..opts.power_iterations {
        let z = orthonormalize(a.tr_mul_dense(&q))?;
        q = orthonormalize(a.mul_dense(&z))?;
    }
    // second pass tightens orthogonality before projecting
    q = orthonormalize(q)?;

    // B = Q^T A, computed as (A^T Q)^T
    let b = a.tr_mul_dense(&q).transpose();
    let svd = b
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("projected SVD did not converge".into()))?;
    let u_small = svd.u.expect("u requested");
    let v = svd.v_t.expect("v requested").transpose();
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let u = gemm(&q, &u_small);
    assemble(u, sigma, v, k, a.nrows(), a.ncols())
}

/// Sort triplets by descending singular value, apply the drop tolerance,
/// truncate to `k`, and fix column signs so the largest-magnitude entry of
/// each left vector is non-negative.
fn assemble(
    u: DMatrix<f64>,
    sigma: Vec<f64>,
    v: DMatrix<f64>,
    k: usize,
    nrows: usize,
    ncols: usize,
) -> Result<SvdFactors> {
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));

    let sigma_max = order.first().map_or(0.0, |&i| sigma[i]);
    let tol = RELATIVE_DROP_TOL * sigma_max;
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&i| sigma[i] > tol && sigma[i] > 0.0)
        .take(k)
        .collect();

    let mut u_k = DMatrix::zeros(nrows, kept.len());
    let mut v_k = DMatrix::zeros(ncols, kept.len());
    let mut s_k = Vec::with_capacity(kept.len());
    for (dst, &src) in kept.iter().enumerate() {
        let mut uc = u.column(src).into_owned();
        let mut vc = v.column(src).into_owned();
        let pivot = uc
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.abs().total_cmp(&b.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        if uc[pivot] < 0.0 {
            uc.neg_mut();
            vc.neg_mut();
        }
        u_k.set_column(dst, &uc);
        v_k.set_column(dst, &vc);
        s_k.push(sigma[src]);
    }
    SvdFactors::new(u_k, s_k, v_k)
}

/// Orthonormalize the columns of `y` via Cholesky QR, falling back to
/// modified Gram-Schmidt when the Gram matrix is numerically singular.
/// Columns with no remaining mass come back as zero columns; downstream
/// singular-value filtering discards their contributions.
fn orthonormalize(y: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let g = gram(&y);
    if let Some(chol) = nalgebra::Cholesky::new(g) {
        let l = chol.l();
        let eye = DMatrix::<f64>::identity(y.ncols(), y.ncols());
        if let Some(l_inv) = l.solve_lower_triangular(&eye) {
            return Ok(gemm(&y, &l_inv.transpose()));
        }
    }
    Ok(modified_gram_schmidt(y))
}

fn modified_gram_schmidt(mut y: DMatrix<f64>) -> DMatrix<f64> {
    let ncols = y.ncols();
    let scale = y
        .column_iter()
        .map(|c| c.norm())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    for j in 0..ncols {
        // two projection passes for numerical robustness
        for _ in 0..2 {
            for i in 0..j {
                let proj = y.column(i).dot(&y.column(j));
                let qi = y.column(i).into_owned();
                y.column_mut(j).axpy(-proj, &qi, 1.0);
            }
        }
        let norm = y.column(j).norm();
        if norm > 1e-14 * scale {
            y.column_mut(j).scale_mut(1.0 / norm);
        } else {
            y.column_mut(j).fill(0.0);
        }
    }
    y
}
