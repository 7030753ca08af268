//! Generative models: DCSBM/DCMM/RDPG networks, latent factors, covariate
//! matrices under three noise families, responses and two-study bundles.

mod covariates;
mod latent;
mod network;
mod response;

pub use covariates::{gen_covariates, gen_logitnormal_noise};
pub use latent::gen_latent;
pub use network::{gen_network, NetworkGenDiagnostics};
pub use response::gen_response;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{DenseMatrix, SparseSymGraph};
use crate::seeds::derive_seed;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
}

/// Degree-heterogeneity parameter samplers.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThetaSampler {
    /// theta_i = Exp(rate) + shift
    ShiftedExp { rate: f64, shift: f64 },
    /// theta_i = |N(mean, sd^2)|
    AbsNormal { mean: f64, sd: f64 },
    Constant { value: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum NetworkModelSpec {
    /// One-hot memberships; edge probability theta_i theta_j y_i^T B y_j.
    Dcsbm {
        k: usize,
        b: DenseMatrix,
        theta: ThetaSampler,
    },
    /// Simplex memberships: one-hot plus Unif(0, h) per coordinate, then
    /// l1-normalized rows.
    Dcmm {
        k: usize,
        b: DenseMatrix,
        theta: ThetaSampler,
        mixture_h: f64,
    },
    /// Latent positions y_i ~ N(mean * 1, Sigma) with block-diagonal Sigma
    /// (unit diagonals, one Unif(0,1) within-block correlation per block);
    /// edge probability rho_n y_i^T y_j.
    Rdpg {
        k: usize,
        rho_n: f64,
        latent_mean: f64,
        n_blocks: usize,
    },
}

impl NetworkModelSpec {
    pub fn k(&self) -> usize {
        match self {
            NetworkModelSpec::Dcsbm { k, .. }
            | NetworkModelSpec::Dcmm { k, .. }
            | NetworkModelSpec::Rdpg { k, .. } => *k,
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        match self {
            NetworkModelSpec::Dcsbm { k, b, .. } | NetworkModelSpec::Dcmm { k, b, .. } => {
                if b.rows() != *k || b.cols() != *k {
                    return Err(GenError::InvalidArgument(format!(
                        "B must be {k}x{k}, got {}x{}",
                        b.rows(),
                        b.cols()
                    )));
                }
                if !b.is_symmetric(1e-12) {
                    return Err(GenError::InvalidArgument("B must be symmetric".into()));
                }
            }
            NetworkModelSpec::Rdpg {
                rho_n, n_blocks, k, ..
            } => {
                if !(*rho_n >= 0.0 && *rho_n <= 1.0) {
                    return Err(GenError::InvalidArgument(format!(
                        "rho_n must lie in [0,1], got {rho_n}"
                    )));
                }
                if *n_blocks == 0 || *n_blocks > *k {
                    return Err(GenError::InvalidArgument(
                        "n_blocks must be in 1..=k".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// The K=3 block model used throughout the desk-scale experiments.
    pub fn dcsbm_default() -> Self {
        let b = DenseMatrix::from_rows(&[
            vec![0.5, 0.25, 0.25],
            vec![0.25, 0.5, 0.25],
            vec![0.25, 0.25, 0.5],
        ])
        .unwrap();
        NetworkModelSpec::Dcsbm {
            k: 3,
            b,
            theta: ThetaSampler::ShiftedExp {
                rate: 5.0,
                shift: 0.06,
            },
        }
    }

    pub fn dcmm_default() -> Self {
        let NetworkModelSpec::Dcsbm { k, b, theta } = Self::dcsbm_default() else {
            unreachable!()
        };
        NetworkModelSpec::Dcmm {
            k,
            b,
            theta,
            mixture_h: 0.3,
        }
    }

    pub fn rdpg_default() -> Self {
        NetworkModelSpec::Rdpg {
            k: 10,
            rho_n: 0.01,
            latent_mean: 0.2,
            n_blocks: 5,
        }
    }
}

/// Distribution of the nonzero loading entries M_{ij}, j in S.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LoadingSampler {
    /// 1/2 N(mu, sd^2) + 1/2 N(-mu, sd^2)
    GaussianMixture { mu: f64, sd: f64 },
    /// 1/2 Unif(lo, mu) + 1/2 Unif(-mu, -lo)
    UniformMixture { lo: f64, mu: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseFamily {
    GaussianUnit,
    /// Cube-root transform of chi^2_5, centered and scaled to unit variance.
    WilsonHilfertyChi5,
    /// One sub-Gaussian distribution drawn per covariate column.
    MixedSubGaussian,
}

/// How the informative set S is determined.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalSet {
    Explicit { indices: Vec<usize> },
    /// |S| covariates sampled without replacement.
    Count { size: usize },
    /// |S| = round(p^{1-beta}).
    FromBeta { beta: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CovariateModelSpec {
    pub p: usize,
    pub signal: SignalSet,
    pub loading: LoadingSampler,
    pub noise: NoiseFamily,
}

impl CovariateModelSpec {
    pub fn resolved_signal_size(&self) -> usize {
        match &self.signal {
            SignalSet::Explicit { indices } => indices.len(),
            SignalSet::Count { size } => *size,
            SignalSet::FromBeta { beta } => {
                ((self.p as f64).powf(1.0 - beta)).round() as usize
            }
        }
    }
}

/// Everything generated for one two-study repetition.
#[derive(Debug, Clone)]
pub struct TwoStudyBundle {
    /// network on the first n subjects
    pub graph: SparseSymGraph,
    /// Study-1 covariates, n x p
    pub x1: DenseMatrix,
    /// Study-2 covariates, (N-n) x p
    pub x2: DenseMatrix,
    /// stacked N x p
    pub xtilde: DenseMatrix,
    /// true latent factors, N x K
    pub y: DenseMatrix,
    /// class labels when the model defines them
    pub labels: Option<Vec<usize>>,
    /// loading matrix K x p
    pub m: DenseMatrix,
    /// informative covariate indices, ascending
    pub s_set: Vec<usize>,
    /// responses on Study-2 subjects
    pub z: Option<Vec<f64>>,
    pub beta_coef: Option<Vec<f64>>,
    pub sigma_delta: f64,
    pub network_diagnostics: NetworkGenDiagnostics,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoStudySpec {
    pub network: NetworkModelSpec,
    pub covariates: CovariateModelSpec,
    /// Study-1 size (network subjects)
    pub n: usize,
    /// total subjects across both studies
    pub n_total: usize,
    /// when set, draw beta ~ N(0, I) and responses z = Y2 beta + delta
    pub response_sigma_delta: Option<f64>,
}

/// Generate one full two-study repetition. Deterministic given `seed`; the
/// first n rows form Study 1, the rest Study 2 (no shuffling).
pub fn gen_two_study(spec: &TwoStudySpec, seed: u64) -> Result<TwoStudyBundle, GenError> {
    if spec.n > spec.n_total {
        return Err(GenError::InvalidArgument(format!(
            "n={} exceeds n_total={}",
            spec.n, spec.n_total
        )));
    }
    spec.network.validate()?;
    let (y, labels) = gen_latent(&spec.network, spec.n_total, derive_seed(seed, "latent", 0))?;
    let y1 = y.slice_rows(0, spec.n);
    let (graph, network_diagnostics) =
        gen_network(&spec.network, &y1, derive_seed(seed, "network", 0))?;
    let (xtilde, m, s_set) =
        gen_covariates(&spec.covariates, &y, derive_seed(seed, "covariates", 0))?;
    let x1 = xtilde.slice_rows(0, spec.n);
    let x2 = xtilde.slice_rows(spec.n, spec.n_total);

    let (z, beta_coef, sigma_delta) = if let Some(sd) = spec.response_sigma_delta {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let mut rng =
            rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(seed, "response-coef", 0));
        let k = spec.network.k();
        let beta: Vec<f64> = (0..k)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let y2 = y.slice_rows(spec.n, spec.n_total);
        let z = gen_response(&y2, &beta, sd, derive_seed(seed, "response", 0))?;
        (Some(z), Some(beta), sd)
    } else {
        (None, None, 0.0)
    };

    Ok(TwoStudyBundle {
        graph,
        x1,
        x2,
        xtilde,
        y,
        labels,
        m,
        s_set,
        z,
        beta_coef,
        sigma_delta,
        network_diagnostics,
    })
}
