//! Compressed sparse column matrix with the handful of products the
//! decomposition and ranking paths need.

use crate::error::{Error, Result};
use crate::linalg::dense;
use nalgebra::DMatrix;

/// Sparse real matrix in CSC layout. Row indices are sorted within each
/// column and stored values are nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CscMatrix {
    /// Build from (row, col, value) triplets. Duplicate coordinates are
    /// summed; entries that are (or sum to) zero are dropped.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for &(r, c, v) in triplets {
            if r >= nrows || c >= ncols {
                return Err(Error::DimensionMismatch(format!(
                    "triplet ({r}, {c}) outside {nrows}x{ncols}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite entry at ({r}, {c})"
                )));
            }
            entries.push((c, r, v));
        }
        entries.sort_unstable_by_key(|&(c, r, _)| (c, r));

        let mut col_ptr = vec![0usize; ncols + 1];
        let mut row_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut it = entries.into_iter().peekable();
        while let Some((c, r, mut v)) = it.next() {
            while let Some(&(c2, r2, v2)) = it.peek() {
                if c2 == c && r2 == r {
                    v += v2;
                    it.next();
                } else {
                    break;
                }
            }
            if v != 0.0 {
                row_idx.push(r);
                values.push(v);
                col_ptr[c + 1] += 1;
            }
        }
        for c in 0..ncols {
            col_ptr[c + 1] += col_ptr[c];
        }
        Ok(Self {
            nrows,
            ncols,
            col_ptr,
            row_idx,
            values,
        })
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            col_ptr: vec![0; ncols + 1],
            row_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn from_dense(a: &DMatrix<f64>) -> Self {
        let mut triplets = Vec::new();
        for c in 0..a.ncols() {
            for r in 0..a.nrows() {
                let v = a[(r, c)];
                if v != 0.0 {
                    triplets.push((r, c, v));
                }
            }
        }
        // entries are finite or the caller fed us NaN on purpose; validated
        // products check anyway
        Self::from_triplets(a.nrows(), a.ncols(), &triplets)
            .expect("triplets from a dense matrix are in range")
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Row indices and values of column `c`.
    pub fn col(&self, c: usize) -> (&[usize], &[f64]) {
        let lo = self.col_ptr[c];
        let hi = self.col_ptr[c + 1];
        (&self.row_idx[lo..hi], &self.values[lo..hi])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.ncols).flat_map(move |c| {
            let (rows, vals) = self.col(c);
            rows.iter().zip(vals).map(move |(&r, &v)| (r, c, v))
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.iter() {
            out[(r, c)] = v;
        }
        out
    }

    pub fn transpose(&self) -> CscMatrix {
        let triplets: Vec<_> = self.iter().map(|(r, c, v)| (c, r, v)).collect();
        Self::from_triplets(self.ncols, self.nrows, &triplets)
            .expect("transposed triplets stay in range")
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Euclidean norm of every column.
    pub fn col_norms(&self) -> Vec<f64> {
        (0..self.ncols)
            .map(|c| self.col(c).1.iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect()
    }

    /// y = A x.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols, "mul_vec dimension");
        let mut y = vec![0.0; self.nrows];
        for (c, &xc) in x.iter().enumerate() {
            if xc != 0.0 {
                let (rows, vals) = self.col(c);
                for (&r, &v) in rows.iter().zip(vals) {
                    y[r] += v * xc;
                }
            }
        }
        y
    }

    /// y = A^T x (one dot product per column).
    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows, "tr_mul_vec dimension");
        (0..self.ncols)
            .map(|c| {
                let (rows, vals) = self.col(c);
                rows.iter().zip(vals).map(|(&r, &v)| v * x[r]).sum()
            })
            .collect()
    }

    /// C = A B with dense B. Parallelism is over output columns, so every
    /// entry is accumulated in the same order as the sequential kernel.
    pub fn mul_dense(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(b.nrows(), self.ncols, "mul_dense dimension");
        let m = self.nrows;
        let mut out = DMatrix::zeros(m, b.ncols());
        let fill = |j: usize, col: &mut [f64]| {
            for c in 0..self.ncols {
                let x = b[(c, j)];
                if x != 0.0 {
                    let (rows, vals) = self.col(c);
                    for (&r, &v) in rows.iter().zip(vals) {
                        col[r] += v * x;
                    }
                }
            }
        };
        dense::for_each_column(out.as_mut_slice(), m, fill);
        out
    }

    /// C = A^T B with dense B.
    pub fn tr_mul_dense(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(b.nrows(), self.nrows, "tr_mul_dense dimension");
        let n = self.ncols;
        let mut out = DMatrix::zeros(n, b.ncols());
        let bs = b.as_slice();
        let m = b.nrows();
        let fill = |j: usize, col: &mut [f64]| {
            let bcol = &bs[j * m..(j + 1) * m];
            for (c, item) in col.iter_mut().enumerate().take(n) {
                let (rows, vals) = self.col(c);
                *item = rows.iter().zip(vals).map(|(&r, &v)| v * bcol[r]).sum();
            }
        };
        dense::for_each_column(out.as_mut_slice(), n, fill);
        out
    }

    /// Sequential reference for [`CscMatrix::mul_dense`]; kept callable so the
    /// bench suite can compare both paths.
    pub fn mul_dense_seq(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(b.nrows(), self.ncols, "mul_dense dimension");
        let m = self.nrows;
        let mut out = DMatrix::zeros(m, b.ncols());
        for j in 0..b.ncols() {
            let col = &mut out.as_mut_slice()[j * m..(j + 1) * m];
            for c in 0..self.ncols {
                let x = b[(c, j)];
                if x != 0.0 {
                    let (rows, vals) = self.col(c);
                    for (&r, &v) in rows.iter().zip(vals) {
                        col[r] += v * x;
                    }
                }
            }
        }
        out
    }

    /// Scale every stored value in place.
    pub fn scale_values(&mut self, f: impl Fn(usize, usize, f64) -> f64) {
        let mut scaled: Vec<(usize, usize, f64)> = Vec::with_capacity(self.nnz());
        for (r, c, v) in self.iter() {
            scaled.push((r, c, f(r, c, v)));
        }
        *self = Self::from_triplets(self.nrows, self.ncols, &scaled)
            .expect("rescaled triplets stay in range");
    }

    /// Number of nonzero entries in each row.
    pub fn row_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.nrows];
        for &r in &self.row_idx {
            counts[r] += 1;
        }
        counts
    }
}
