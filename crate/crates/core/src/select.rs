//! The selection core: spectral basis construction, the screening statistic
//! t_j = ||U^T X_j||^2, p-values and HC thresholding, end to end.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    top_k_eigen, truncated_svd, DenseMatrix, DirectedGraph, LinalgError, SparseSymGraph,
};
use crate::rstats::{hct_select, PValueMode, SelectionResult, StatsError};

#[derive(Debug, Error)]
pub enum SelectError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Where the projection basis came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisSource {
    AdjacencyEigen,
    LaplacianEigen,
    DirectedLeftSvd,
    OracleY,
    External,
}

/// An n x Khat column-orthonormal projection.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    pub u: DenseMatrix,
    pub source: BasisSource,
}

impl SpectralBasis {
    pub fn n(&self) -> usize {
        self.u.rows()
    }

    pub fn khat(&self) -> usize {
        self.u.cols()
    }

    pub fn from_external(u: DenseMatrix) -> Self {
        SpectralBasis {
            u,
            source: BasisSource::External,
        }
    }
}

const EIG_TOL: f64 = 1e-10;

/// Top-Khat eigenvector basis of the adjacency or regularized Laplacian.
pub fn build_basis_graph(
    graph: &SparseSymGraph,
    khat: usize,
    source: BasisSource,
    seed: u64,
) -> Result<SpectralBasis, SelectError> {
    if khat > graph.n() {
        return Err(SelectError::InvalidArgument(format!(
            "Khat={khat} exceeds n={}",
            graph.n()
        )));
    }
    let max_iter = 50 * khat + 200;
    let eig = match source {
        BasisSource::AdjacencyEigen => top_k_eigen(graph, khat, EIG_TOL, max_iter, seed)?,
        BasisSource::LaplacianEigen => {
            let lap = graph.laplacian();
            top_k_eigen(&lap, khat, EIG_TOL, max_iter, seed)?
        }
        other => {
            return Err(SelectError::InvalidArgument(format!(
                "basis source {other:?} is not graph-spectral"
            )))
        }
    };
    Ok(SpectralBasis {
        u: eig.vectors,
        source,
    })
}

/// Leading left singular vectors of a directed adjacency, via the
/// eigenvectors of A A^T.
pub fn build_basis_directed(
    graph: &DirectedGraph,
    khat: usize,
    seed: u64,
) -> Result<SpectralBasis, SelectError> {
    if khat > graph.n() {
        return Err(SelectError::InvalidArgument(format!(
            "Khat={khat} exceeds n={}",
            graph.n()
        )));
    }
    let gram = crate::linalg::GramOfDirected { graph };
    let eig = top_k_eigen(&gram, khat, EIG_TOL, 50 * khat + 200, seed)?;
    Ok(SpectralBasis {
        u: eig.vectors,
        source: BasisSource::DirectedLeftSvd,
    })
}

/// Oracle basis: top left singular vectors of the true latent factors Y.
pub fn build_basis_oracle(y: &DenseMatrix, khat: usize, seed: u64) -> Result<SpectralBasis, SelectError> {
    if khat > y.rows() {
        return Err(SelectError::InvalidArgument(format!(
            "Khat={khat} exceeds n={}",
            y.rows()
        )));
    }
    let k = khat.min(y.cols());
    let svd = truncated_svd(y, k, EIG_TOL, seed)?;
    if k < khat {
        return Err(SelectError::InvalidArgument(format!(
            "oracle basis rank limited to K={}, requested Khat={khat}",
            y.cols()
        )));
    }
    Ok(SpectralBasis {
        u: svd.u,
        source: BasisSource::OracleY,
    })
}

/// Screening statistics t_j = sum_k (xi_k^T X_j)^2 for every column of X.
pub fn screen(x: &DenseMatrix, basis: &SpectralBasis) -> Result<Vec<f64>, SelectError> {
    if x.rows() != basis.n() {
        return Err(SelectError::InvalidArgument(format!(
            "X has {} rows but the basis lives on n={}",
            x.rows(),
            basis.n()
        )));
    }
    // U^T X is Khat x p; t_j is a column's squared norm
    let proj = basis.u.transpose().matmul(x)?;
    let p = x.cols();
    let mut t = vec![0.0f64; p];
    for k in 0..proj.rows() {
        for (j, &v) in proj.row(k).iter().enumerate() {
            t[j] += v * v;
        }
    }
    Ok(t)
}

/// Per-column z-scoring, for real data whose columns are not unit-variance.
pub fn standardize_columns(x: &DenseMatrix) -> DenseMatrix {
    let n = x.rows();
    let mut out = x.clone();
    for j in 0..x.cols() {
        let col = x.col(j);
        let mean = col.iter().sum::<f64>() / n as f64;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let sd = var.sqrt();
        for i in 0..n {
            let v = if sd > 0.0 { (x.get(i, j) - mean) / sd } else { 0.0 };
            out.set(i, j, v);
        }
    }
    out
}

/// The full selection pipeline over a prebuilt basis.
pub fn ngcs_with_basis(
    basis: &SpectralBasis,
    x: &DenseMatrix,
    mode: &PValueMode,
) -> Result<SelectionResult, SelectError> {
    let t = screen(x, basis)?;
    let khat = basis.khat();
    let pi: Vec<f64> = t.iter().map(|&tj| mode.pvalue(tj, khat)).collect();
    let out = hct_select(&pi)?;
    Ok(SelectionResult {
        t,
        pi,
        order: out.order,
        hc: out.hc,
        max_hc: out.max_hc,
        tested_nonempty: out.tested_nonempty,
        threshold: out.threshold,
        selected: out.selected,
    })
}

/// Convenience composition: basis from the graph, then screen and threshold.
pub fn ngcs(
    graph: &SparseSymGraph,
    x: &DenseMatrix,
    khat: usize,
    mode: &PValueMode,
    source: BasisSource,
    seed: u64,
) -> Result<SelectionResult, SelectError> {
    let basis = build_basis_graph(graph, khat, source, seed)?;
    ngcs_with_basis(&basis, x, mode)
}

/// Aggregated signal strength tau(U) = min_{j in S} ||U^T Y M_j||.
/// An oracle diagnostic; +inf for empty S.
pub fn tau_diagnostic(
    basis: &SpectralBasis,
    y: &DenseMatrix,
    m: &DenseMatrix,
    s_set: &[usize],
) -> Result<f64, SelectError> {
    if s_set.is_empty() {
        return Ok(f64::INFINITY);
    }
    if y.rows() != basis.n() || m.rows() != y.cols() {
        return Err(SelectError::InvalidArgument(
            "dimension mismatch between basis, Y and M".into(),
        ));
    }
    // U^T Y is Khat x K
    let uty = basis.u.transpose().matmul(y)?;
    let mut tau = f64::INFINITY;
    for &j in s_set {
        if j >= m.cols() {
            return Err(SelectError::InvalidArgument(
                "signal index out of range".into(),
            ));
        }
        let mj = m.col(j);
        let v = uty.matvec(&mj);
        tau = tau.min(crate::linalg::norm2(&v));
    }
    Ok(tau)
}

/// Rank covariates by the marginal statistic sum_i X_{ij}^2, descending,
/// ties by index.
pub fn marginal_chi2_rank(x: &DenseMatrix) -> Vec<usize> {
    let p = x.cols();
    let mut energy = vec![0.0f64; p];
    for i in 0..x.rows() {
        for (j, &v) in x.row(i).iter().enumerate() {
            energy[j] += v * v;
        }
    }
    let mut idx: Vec<usize> = (0..p).collect();
    idx.sort_by(|&a, &b| energy[b].partial_cmp(&energy[a]).unwrap().then(a.cmp(&b)));
    idx
}
