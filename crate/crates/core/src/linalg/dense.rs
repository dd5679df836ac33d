//! Dense kernels used by the decomposition and similarity paths.
//!
//! Every parallel kernel splits work by output column and computes each
//! column exactly as the sequential kernel does, so results are bitwise
//! identical regardless of thread count.

use nalgebra::DMatrix;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Run `fill(j, column_j)` for every column of a column-major buffer.
#[cfg(feature = "parallel")]
pub(crate) fn for_each_column<F>(data: &mut [f64], col_len: usize, fill: F)
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    if col_len == 0 {
        return;
    }
    data.par_chunks_mut(col_len)
        .enumerate()
        .for_each(|(j, col)| fill(j, col));
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn for_each_column<F>(data: &mut [f64], col_len: usize, fill: F)
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    if col_len == 0 {
        return;
    }
    for (j, col) in data.chunks_mut(col_len).enumerate() {
        fill(j, col);
    }
}

/// C = A B.
pub fn gemm(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.ncols(), b.nrows(), "gemm dimension");
    let m = a.nrows();
    let inner = a.ncols();
    let mut out = DMatrix::zeros(m, b.ncols());
    let asl = a.as_slice();
    let fill = |j: usize, col: &mut [f64]| {
        for k in 0..inner {
            let x = b[(k, j)];
            if x != 0.0 {
                let acol = &asl[k * m..(k + 1) * m];
                for (o, &av) in col.iter_mut().zip(acol) {
                    *o += av * x;
                }
            }
        }
    };
    for_each_column(out.as_mut_slice(), m, fill);
    out
}

/// Sequential reference for [`gemm`]; kept callable for the bench suite.
pub fn gemm_seq(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.ncols(), b.nrows(), "gemm dimension");
    let m = a.nrows();
    let inner = a.ncols();
    let mut out = DMatrix::zeros(m, b.ncols());
    let asl = a.as_slice();
    for j in 0..b.ncols() {
        let col = &mut out.as_mut_slice()[j * m..(j + 1) * m];
        for k in 0..inner {
            let x = b[(k, j)];
            if x != 0.0 {
                let acol = &asl[k * m..(k + 1) * m];
                for (o, &av) in col.iter_mut().zip(acol) {
                    *o += av * x;
                }
            }
        }
    }
    out
}

/// G = A^T A (symmetric Gram matrix).
pub fn gram(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.ncols();
    let m = a.nrows();
    let asl = a.as_slice();
    let mut out = DMatrix::zeros(n, n);
    let fill = |j: usize, col: &mut [f64]| {
        let cj = &asl[j * m..(j + 1) * m];
        for (i, item) in col.iter_mut().enumerate().take(n) {
            let ci = &asl[i * m..(i + 1) * m];
            *item = ci.iter().zip(cj).map(|(x, y)| x * y).sum();
        }
    };
    for_each_column(out.as_mut_slice(), n, fill);
    out
}

/// Cosine of the angle between two vectors; 0 by convention when either
/// vector has zero norm.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "cosine dimension");
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot / (na.sqrt() * nb.sqrt())
}

/// Square root of the sum of squared entries.
pub fn frobenius_norm(a: &DMatrix<f64>) -> f64 {
    a.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt()
}
