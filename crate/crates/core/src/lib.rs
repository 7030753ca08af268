//! Network-guided covariate selection (NGCS) and its two-study downstream
//! algorithms NG-clu and NG-reg.
//!
//! The crate is organized around the pipeline:
//!
//! 1. [`linalg`] — deterministic eigen/SVD/k-means kernels,
//! 2. [`rstats`] — chi-square tails and Higher-Criticism thresholding,
//! 3. [`netgen`] — generative network and covariate models,
//! 4. [`select`] — the screening statistic and the selection pipeline,
//! 5. [`downstream`] — clustering and regression on post-selection data,
//! 6. [`harness`] — experiment orchestration, file I/O and plotting.

pub mod downstream;
pub mod harness;
pub mod linalg;
pub mod netgen;
pub mod rstats;
pub mod seeds;
pub mod select;

pub use linalg::{DenseMatrix, DirectedGraph, EigenResult, SparseSymGraph, SvdResult};
pub use rstats::{PValueMode, SelectionResult};
pub use select::{BasisSource, SpectralBasis};
