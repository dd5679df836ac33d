//! Rank-limited Moore-Penrose pseudoinverse built from truncated factors.

use crate::error::Result;
use crate::linalg::dense::gemm;
use crate::linalg::svd::{svd_truncated, MatrixRef, SvdFactors};
use nalgebra::DMatrix;

/// `V_k diag(1/sigma) U_k^T`, sharing the singular value drop tolerance of
/// the decomposition so reciprocals stay bounded.
pub fn pseudoinverse_k(a: MatrixRef<'_>, k: usize) -> Result<DMatrix<f64>> {
    let factors = svd_truncated(a, k)?;
    Ok(pseudoinverse_from_factors(&factors))
}

pub fn pseudoinverse_from_factors(f: &SvdFactors) -> DMatrix<f64> {
    if f.k() == 0 {
        return DMatrix::zeros(f.ncols(), f.nrows());
    }
    let mut v_scaled = f.v().clone();
    for (j, &s) in f.sigma().iter().enumerate() {
        v_scaled.column_mut(j).scale_mut(1.0 / s);
    }
    gemm(&v_scaled, &f.u().transpose())
}
