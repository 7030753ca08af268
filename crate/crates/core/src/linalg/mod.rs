//! Dense/sparse linear-algebra kernels: top-k symmetric eigenpairs,
//! truncated SVD and k-means. Everything here is deterministic given a seed.

mod dense;
mod eigen;
mod jacobi;
mod kmeans;
mod lanczos;
mod sparse;
mod svd;

pub use dense::DenseMatrix;
pub use eigen::{top_k_eigen, EigenResult, SymOp};
pub use kmeans::{kmeans, KMeansResult};
pub use sparse::{DirectedGraph, GramOfDirected, Laplacian, SparseSymGraph};
pub use svd::{truncated_svd, SvdResult};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("eigensolver did not converge after {iterations} iterations (best residual {best_residual:e})")]
    NoConvergence {
        iterations: usize,
        best_residual: f64,
    },
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Flip a vector in place so that its largest-magnitude entry is positive.
/// Ties broken by the lowest index.
pub(crate) fn canonical_sign(v: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}
