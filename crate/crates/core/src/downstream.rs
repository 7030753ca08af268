//! Two-study applications of the selection core: clustering over a pooled
//! covariate matrix and regression with prediction for new subjects.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{kmeans, truncated_svd, DenseMatrix, LinalgError, SparseSymGraph};
use crate::rstats::{PValueMode, SelectionResult, StatsError};
use crate::seeds::derive_seed;
use crate::select::{ngcs, BasisSource, SelectError};

#[derive(Debug, Error)]
pub enum DownstreamError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("selection is empty; fall back to a marginal or full-matrix method")]
    EmptySelection,
    #[error(transparent)]
    Select(#[from] SelectError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

const SVD_TOL: f64 = 1e-10;

/// Result of the clustering pipeline.
#[derive(Debug, Clone)]
pub struct ClusterOutput {
    /// one cluster id in 0..K per pooled subject
    pub labels: Vec<usize>,
    /// the N x Khat weighted embedding U diag(S) fed to k-means
    pub embedding: DenseMatrix,
    /// covariates actually used
    pub selected: Vec<usize>,
    /// the selection stage, for diagnostics
    pub selection: SelectionResult,
    /// the no-signal test fired and the full matrix was embedded instead
    pub fallback_full: bool,
    /// rank actually used; lower than requested when |S| is small
    pub khat_used: usize,
}

/// Result of the regression pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegressionOutput {
    /// coefficients over the selected covariates, same order as `selected`
    pub gamma_hat: Vec<f64>,
    pub selected: Vec<usize>,
    /// SVD rank kept after dropping near-zero singular values
    pub khat: usize,
    /// total covariate count, for validating prediction inputs
    pub p: usize,
}

impl RegressionOutput {
    pub fn predict(&self, x_new: &[f64]) -> Result<f64, DownstreamError> {
        predict(self, x_new)
    }
}

/// Selection on (A, X1), then rank-Khat spectral clustering of the pooled
/// matrix restricted to the selected covariates.
#[allow(clippy::too_many_arguments)]
pub fn ng_clu(
    graph: &SparseSymGraph,
    x1: &DenseMatrix,
    xtilde: &DenseMatrix,
    k: usize,
    khat: usize,
    mode: &PValueMode,
    source: BasisSource,
    seed: u64,
) -> Result<ClusterOutput, DownstreamError> {
    if xtilde.rows() == 0 || xtilde.cols() == 0 {
        return Err(DownstreamError::InvalidArgument(
            "pooled covariate matrix is empty".into(),
        ));
    }
    if x1.cols() != xtilde.cols() {
        return Err(DownstreamError::InvalidArgument(format!(
            "column mismatch: X1 has p={}, pooled has p={}",
            x1.cols(),
            xtilde.cols()
        )));
    }
    if x1.rows() != graph.n() || xtilde.rows() < x1.rows() {
        return Err(DownstreamError::InvalidArgument(
            "X1 must cover exactly the network nodes and the pooled matrix at least those".into(),
        ));
    }
    if k == 0 || k > xtilde.rows() {
        return Err(DownstreamError::InvalidArgument(format!(
            "K={k} must be in 1..=N={}",
            xtilde.rows()
        )));
    }

    let selection = ngcs(graph, x1, khat, mode, source, derive_seed(seed, "basis", 0))?;
    let fallback_full = selection.selected.is_empty();
    let (work, selected) = if fallback_full {
        (xtilde.clone(), Vec::new())
    } else {
        (selection.restrict(xtilde)?, selection.selected.clone())
    };

    let khat_used = khat.min(work.cols()).min(work.rows());
    let svd = truncated_svd(&work, khat_used, SVD_TOL, derive_seed(seed, "embed-svd", 0))?;
    let n = work.rows();
    let mut embedding = DenseMatrix::zeros(n, khat_used);
    for j in 0..khat_used {
        let sj = svd.s[j];
        for i in 0..n {
            embedding.set(i, j, svd.u.get(i, j) * sj);
        }
    }
    let km = kmeans(&embedding, k, 10, 300, 1e-6, derive_seed(seed, "kmeans", 0))?;

    Ok(ClusterOutput {
        labels: km.labels,
        embedding,
        selected,
        selection,
        fallback_full,
        khat_used,
    })
}

/// How the label-matching minimum over permutations is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelMatching {
    /// exhaustive for K <= 8, assignment above
    Auto,
    /// all K! permutations; rejected for K > 12
    Exhaustive,
    /// Hungarian assignment, any K
    Assignment,
}

/// Fraction misclassified, minimized over relabelings of the estimate.
pub fn clustering_error(
    est: &[usize],
    truth: &[usize],
    k: usize,
    matching: LabelMatching,
) -> Result<f64, DownstreamError> {
    if est.len() != truth.len() {
        return Err(DownstreamError::InvalidArgument(format!(
            "label lengths differ: {} vs {}",
            est.len(),
            truth.len()
        )));
    }
    if est.is_empty() {
        return Err(DownstreamError::InvalidArgument("empty labels".into()));
    }
    if k == 0 || est.iter().chain(truth).any(|&l| l >= k) {
        return Err(DownstreamError::InvalidArgument(format!(
            "labels must lie in 0..{k}"
        )));
    }
    let n = est.len();
    // agreement[a][b] = #{i : est_i = a, truth_i = b}
    let mut agree = vec![vec![0usize; k]; k];
    for (&e, &t) in est.iter().zip(truth) {
        agree[e][t] += 1;
    }

    let matching = match matching {
        LabelMatching::Auto => {
            if k <= 8 {
                LabelMatching::Exhaustive
            } else {
                LabelMatching::Assignment
            }
        }
        m => m,
    };
    let best_agree = match matching {
        LabelMatching::Exhaustive => {
            if k > 12 {
                return Err(DownstreamError::InvalidArgument(format!(
                    "exhaustive matching is limited to K <= 12, got K={k}; use assignment"
                )));
            }
            let mut perm: Vec<usize> = (0..k).collect();
            let mut best = 0usize;
            permute_all(&mut perm, 0, &mut |p| {
                let total: usize = (0..k).map(|a| agree[a][p[a]]).sum();
                if total > best {
                    best = total;
                }
            });
            best
        }
        LabelMatching::Assignment => hungarian_max(&agree),
        LabelMatching::Auto => unreachable!(),
    };
    Ok((n - best_agree) as f64 / n as f64)
}

fn permute_all(perm: &mut Vec<usize>, at: usize, f: &mut impl FnMut(&[usize])) {
    if at == perm.len() {
        f(perm);
        return;
    }
    for i in at..perm.len() {
        perm.swap(at, i);
        permute_all(perm, at + 1, f);
        perm.swap(at, i);
    }
}

/// Maximum-total assignment on a square profit matrix via the Hungarian
/// algorithm with potentials, O(k^3).
fn hungarian_max(profit: &[Vec<usize>]) -> usize {
    let k = profit.len();
    let max_entry = profit
        .iter()
        .flat_map(|r| r.iter())
        .copied()
        .max()
        .unwrap_or(0) as i64;
    // convert to min-cost
    let cost: Vec<Vec<i64>> = profit
        .iter()
        .map(|r| r.iter().map(|&v| max_entry - v as i64).collect())
        .collect();

    let inf = i64::MAX / 4;
    let mut u = vec![0i64; k + 1];
    let mut v = vec![0i64; k + 1];
    let mut way = vec![0usize; k + 1];
    let mut p = vec![0usize; k + 1];
    for i in 1..=k {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=k {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut total = 0usize;
    for j in 1..=k {
        if p[j] != 0 {
            total += profit[p[j] - 1][j - 1];
        }
    }
    total
}

/// Selection on (A, X1), then least-squares-type coefficients from the
/// rank-Khat SVD of the restricted Study-2 matrix.
#[allow(clippy::too_many_arguments)]
pub fn ng_reg(
    graph: &SparseSymGraph,
    x1: &DenseMatrix,
    x2: &DenseMatrix,
    z: &[f64],
    khat: usize,
    mode: &PValueMode,
    source: BasisSource,
    seed: u64,
) -> Result<RegressionOutput, DownstreamError> {
    if x1.cols() != x2.cols() {
        return Err(DownstreamError::InvalidArgument(format!(
            "column mismatch: X1 has p={}, X2 has p={}",
            x1.cols(),
            x2.cols()
        )));
    }
    if x2.rows() != z.len() {
        return Err(DownstreamError::InvalidArgument(format!(
            "X2 has {} rows but z has {} entries",
            x2.rows(),
            z.len()
        )));
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(DownstreamError::InvalidArgument(
            "z contains non-finite values".into(),
        ));
    }
    if x1.rows() != graph.n() {
        return Err(DownstreamError::InvalidArgument(
            "X1 must cover exactly the network nodes".into(),
        ));
    }

    let selection = ngcs(graph, x1, khat, mode, source, derive_seed(seed, "basis", 0))?;
    if selection.selected.is_empty() {
        return Err(DownstreamError::EmptySelection);
    }
    let restricted = selection.restrict(x2)?;
    gamma_from_svd(&restricted, z, khat, selection.selected, x1.cols(), seed)
}

fn gamma_from_svd(
    restricted: &DenseMatrix,
    z: &[f64],
    khat: usize,
    selected: Vec<usize>,
    p: usize,
    seed: u64,
) -> Result<RegressionOutput, DownstreamError> {
    let rank_req = khat.min(restricted.rows()).min(restricted.cols());
    let svd = truncated_svd(restricted, rank_req, SVD_TOL, derive_seed(seed, "reg-svd", 0))?;
    let smax = svd.s.first().copied().unwrap_or(0.0);
    let cut = 1e-10 * smax;
    // gamma = sum_j s_j^{-1} (u_j^T z) v_j over retained singular values
    let mut gamma = vec![0.0f64; restricted.cols()];
    let mut kept = 0usize;
    for j in 0..rank_req {
        if svd.s[j] <= cut || svd.s[j] == 0.0 {
            continue;
        }
        kept += 1;
        let uz = crate::linalg::dot(&svd.u.col(j), z);
        let w = uz / svd.s[j];
        for (g, vv) in gamma.iter_mut().zip(svd.v.col(j)) {
            *g += w * vv;
        }
    }
    Ok(RegressionOutput {
        gamma_hat: gamma,
        selected,
        khat: kept,
        p,
    })
}

/// z_hat = gamma^T x_new restricted to the selected coordinates.
pub fn predict(model: &RegressionOutput, x_new: &[f64]) -> Result<f64, DownstreamError> {
    if x_new.len() != model.p {
        return Err(DownstreamError::InvalidArgument(format!(
            "x_new has {} entries, expected p={}",
            x_new.len(),
            model.p
        )));
    }
    Ok(model
        .selected
        .iter()
        .zip(&model.gamma_hat)
        .map(|(&j, &g)| g * x_new[j])
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_zero_when_identical_or_relabeled() {
        let truth = vec![0, 0, 1, 1, 2, 2];
        assert_eq!(
            clustering_error(&truth, &truth, 3, LabelMatching::Auto).unwrap(),
            0.0
        );
        let swapped: Vec<usize> = truth.iter().map(|&l| (l + 1) % 3).collect();
        assert_eq!(
            clustering_error(&swapped, &truth, 3, LabelMatching::Auto).unwrap(),
            0.0
        );
    }

    #[test]
    fn hand_case_two_of_six() {
        // both 2-permutations leave at least 2 mismatches
        let est = vec![0, 0, 0, 1, 1, 1];
        let truth = vec![1, 1, 0, 0, 0, 1];
        let e = clustering_error(&est, &truth, 2, LabelMatching::Exhaustive).unwrap();
        assert!((e - 2.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn hungarian_matches_exhaustive() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..50 {
            let k = 2 + (trial % 6);
            let n = 60;
            let est: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let truth: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let a = clustering_error(&est, &truth, k, LabelMatching::Exhaustive).unwrap();
            let b = clustering_error(&est, &truth, k, LabelMatching::Assignment).unwrap();
            assert!((a - b).abs() < 1e-15, "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn exhaustive_rejected_above_twelve() {
        let est: Vec<usize> = (0..13).collect();
        let truth = est.clone();
        assert!(clustering_error(&est, &truth, 13, LabelMatching::Exhaustive).is_err());
        assert_eq!(
            clustering_error(&est, &truth, 13, LabelMatching::Assignment).unwrap(),
            0.0
        );
    }

    #[test]
    fn predict_hand_case_and_trivia() {
        let model = RegressionOutput {
            gamma_hat: vec![1.0, -2.0],
            selected: vec![1, 3],
            khat: 2,
            p: 5,
        };
        // x on the selected coordinates is (3, 1)
        let x = vec![9.0, 3.0, 9.0, 1.0, 9.0];
        assert_eq!(model.predict(&x).unwrap(), 1.0);
        let zero_on_s = vec![9.0, 0.0, 9.0, 0.0, 9.0];
        assert_eq!(model.predict(&zero_on_s).unwrap(), 0.0);
        assert!(model.predict(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn zero_response_gives_zero_gamma() {
        let x = DenseMatrix::from_rows(&[
            vec![1.0, 0.5],
            vec![0.2, 1.0],
            vec![0.7, -0.3],
        ])
        .unwrap();
        let out = gamma_from_svd(&x, &[0.0; 3], 2, vec![0, 1], 2, 0).unwrap();
        assert!(out.gamma_hat.iter().all(|&g| g.abs() < 1e-14));
    }

    #[test]
    fn noiseless_regression_identity() {
        // X2 = Y M full rank, z = Y beta: prediction on a new subject is exact
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let (n2, k, p) = (40, 3, 6);
        let mut y2 = DenseMatrix::zeros(n2, k);
        for i in 0..n2 {
            y2.set(i, i % k, 1.0);
            for c in 0..k {
                y2.set(i, c, y2.get(i, c) + 0.3 * rng.gen::<f64>());
            }
        }
        let mut m = DenseMatrix::zeros(k, p);
        for i in 0..k {
            for j in 0..p {
                m.set(i, j, rng.gen::<f64>() - 0.5);
            }
        }
        let x2 = y2.matmul(&m).unwrap();
        let beta = [0.7, -1.2, 0.4];
        let z: Vec<f64> = (0..n2).map(|i| crate::linalg::dot(y2.row(i), &beta)).collect();
        let out = gamma_from_svd(&x2, &z, k, (0..p).collect(), p, 1).unwrap();
        let y0 = [0.9, 0.2, -0.1];
        let x0 = m.matvec_t(&y0);
        let zhat = predict(&out, &x0).unwrap();
        let ztrue = crate::linalg::dot(&y0, &beta);
        assert!((zhat - ztrue).abs() < 1e-8, "{zhat} vs {ztrue}");
    }

    #[test]
    fn permutation_invariance_random_relabelings() {
        use rand::seq::SliceRandom;
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let k = 4;
        let truth: Vec<usize> = (0..40).map(|_| rng.gen_range(0..k)).collect();
        let est: Vec<usize> = (0..40).map(|_| rng.gen_range(0..k)).collect();
        let base = clustering_error(&est, &truth, k, LabelMatching::Auto).unwrap();
        for _ in 0..50 {
            let mut perm: Vec<usize> = (0..k).collect();
            perm.shuffle(&mut rng);
            let relabeled: Vec<usize> = est.iter().map(|&l| perm[l]).collect();
            let e = clustering_error(&relabeled, &truth, k, LabelMatching::Auto).unwrap();
            assert_eq!(e, base);
        }
    }
}
