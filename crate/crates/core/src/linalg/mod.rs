//! Matrix primitives: sparse storage, dense kernels, truncated SVD, and the
//! rank-limited pseudoinverse.

pub mod dense;
pub mod pinv;
pub mod sparse;
pub mod svd;

pub use dense::{cosine, frobenius_norm, gemm, gemm_seq};
pub use pinv::{pseudoinverse_from_factors, pseudoinverse_k};
pub use sparse::CscMatrix;
pub use svd::{svd_truncated, svd_truncated_with, MatrixRef, SvdFactors, SvdOptions};
