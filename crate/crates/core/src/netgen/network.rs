use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};

use super::{GenError, NetworkModelSpec, ThetaSampler};
use crate::linalg::{DenseMatrix, SparseSymGraph};

/// Counts of link probabilities that fell outside [0,1] before clamping.
#[derive(Debug, Clone, Copy, Default)]
pub struct NetworkGenDiagnostics {
    pub clamped_low: usize,
    pub clamped_high: usize,
}

/// Independent Bernoulli edges for i < j with probability clamp(g(y_i, y_j)).
///
/// Probabilities outside [0,1] are clamped and counted, never silently.
pub fn gen_network(
    spec: &NetworkModelSpec,
    y: &DenseMatrix,
    seed: u64,
) -> Result<(SparseSymGraph, NetworkGenDiagnostics), GenError> {
    spec.validate()?;
    let n = y.rows();
    if y.cols() != spec.k() {
        return Err(GenError::InvalidArgument(format!(
            "latent dimension {} does not match model K={}",
            y.cols(),
            spec.k()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let theta: Option<Vec<f64>> = match spec {
        NetworkModelSpec::Dcsbm { theta, .. } | NetworkModelSpec::Dcmm { theta, .. } => {
            Some(sample_theta(theta, n, &mut rng)?)
        }
        NetworkModelSpec::Rdpg { .. } => None,
    };

    // y_i^T B y_j needs B y_j; precompute the transformed rows
    let by: Option<DenseMatrix> = match spec {
        NetworkModelSpec::Dcsbm { b, .. } | NetworkModelSpec::Dcmm { b, .. } => {
            Some(y.matmul(b)?)
        }
        NetworkModelSpec::Rdpg { .. } => None,
    };

    let mut diag = NetworkGenDiagnostics::default();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let raw = match spec {
                NetworkModelSpec::Dcsbm { .. } | NetworkModelSpec::Dcmm { .. } => {
                    let th = theta.as_ref().unwrap();
                    th[i] * th[j] * crate::linalg::dot(by.as_ref().unwrap().row(i), y.row(j))
                }
                NetworkModelSpec::Rdpg { rho_n, .. } => {
                    rho_n * crate::linalg::dot(y.row(i), y.row(j))
                }
            };
            let prob = if raw < 0.0 {
                diag.clamped_low += 1;
                0.0
            } else if raw > 1.0 {
                diag.clamped_high += 1;
                1.0
            } else {
                raw
            };
            if prob > 0.0 && rng.gen::<f64>() < prob {
                edges.push((i, j));
            }
        }
    }
    let graph = SparseSymGraph::from_edges(n, edges)?;
    Ok((graph, diag))
}

fn sample_theta(
    sampler: &ThetaSampler,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>, GenError> {
    Ok(match sampler {
        ThetaSampler::ShiftedExp { rate, shift } => {
            let exp = Exp::new(*rate)
                .map_err(|e| GenError::InvalidArgument(format!("bad Exp rate: {e}")))?;
            (0..n).map(|_| exp.sample(rng) + shift).collect()
        }
        ThetaSampler::AbsNormal { mean, sd } => {
            let normal = Normal::new(*mean, *sd)
                .map_err(|e| GenError::InvalidArgument(format!("bad Normal params: {e}")))?;
            (0..n).map(|_| normal.sample(rng).abs()).collect()
        }
        ThetaSampler::Constant { value } => vec![*value; n],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_ones_block_matrix_gives_complete_graph() {
        let mut b = DenseMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                b.set(i, j, 1.0);
            }
        }
        let spec = NetworkModelSpec::Dcsbm {
            k: 2,
            b,
            theta: ThetaSampler::Constant { value: 1.0 },
        };
        let mut y = DenseMatrix::zeros(10, 2);
        for i in 0..10 {
            y.set(i, i % 2, 1.0);
        }
        let (g, _) = gen_network(&spec, &y, 0).unwrap();
        assert_eq!(g.edges().len(), 45);
    }

    #[test]
    fn zero_density_rdpg_gives_empty_graph() {
        let spec = NetworkModelSpec::Rdpg {
            k: 2,
            rho_n: 0.0,
            latent_mean: 0.2,
            n_blocks: 1,
        };
        let mut y = DenseMatrix::zeros(20, 2);
        for i in 0..20 {
            y.set(i, 0, 1.0);
        }
        let (g, _) = gen_network(&spec, &y, 0).unwrap();
        assert_eq!(g.edges().len(), 0);
    }

    #[test]
    fn within_vs_between_block_rate_ratio() {
        // B with diag 1/2, off-diag 1/4, constant theta: within/between ~ 2
        let b = DenseMatrix::from_rows(&[
            vec![0.5, 0.25, 0.25],
            vec![0.25, 0.5, 0.25],
            vec![0.25, 0.25, 0.5],
        ])
        .unwrap();
        let spec = NetworkModelSpec::Dcsbm {
            k: 3,
            b,
            theta: ThetaSampler::Constant { value: 0.8 },
        };
        let n = 500;
        let mut within_edges = 0usize;
        let mut within_pairs = 0usize;
        let mut between_edges = 0usize;
        let mut between_pairs = 0usize;
        for seed in 0..20u64 {
            let (y, labels) =
                super::super::gen_latent(&spec, n, 1000 + seed).unwrap();
            let labels = labels.unwrap();
            let (g, _) = gen_network(&spec, &y, 2000 + seed).unwrap();
            let mut is_edge = std::collections::HashSet::new();
            for &(a, bb) in g.edges() {
                is_edge.insert((a as usize, bb as usize));
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    let same = labels[i] == labels[j];
                    let e = is_edge.contains(&(i, j));
                    if same {
                        within_pairs += 1;
                        within_edges += e as usize;
                    } else {
                        between_pairs += 1;
                        between_edges += e as usize;
                    }
                }
            }
        }
        let ratio = (within_edges as f64 / within_pairs as f64)
            / (between_edges as f64 / between_pairs as f64);
        assert!((ratio - 2.0).abs() < 0.2, "ratio {ratio}");
    }
}
