use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::netgen::{
    CovariateModelSpec, LoadingSampler, NetworkModelSpec, NoiseFamily, SignalSet,
};
use crate::rstats::PValueMode;
use crate::select::BasisSource;

/// Which metric the simulate pipeline produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    FdrSweep,
    Cluster,
    Regression,
}

/// One network-times-noise scenario with its signal-strength grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub id: String,
    pub network: NetworkModelSpec,
    pub noise: NoiseFamily,
    /// template for the nonzero loading entries; the `mu` parameter is
    /// overwritten by each grid value
    pub loading: LoadingSampler,
    pub mu_grid: Vec<f64>,
    /// number of latent classes or dimensions
    pub k: usize,
    /// projection rank for selection and downstream embeddings
    pub khat: usize,
}

impl ScenarioConfig {
    pub fn loading_at(&self, mu: f64) -> LoadingSampler {
        match self.loading {
            LoadingSampler::GaussianMixture { sd, .. } => {
                LoadingSampler::GaussianMixture { mu, sd }
            }
            LoadingSampler::UniformMixture { lo, .. } => LoadingSampler::UniformMixture { lo, mu },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub task: TaskKind,
    pub scenarios: Vec<ScenarioConfig>,
    /// Study-1 (network) subjects
    pub n: usize,
    /// total subjects across both studies
    pub n_total: usize,
    pub p: usize,
    pub signal_size: usize,
    pub reps: usize,
    pub master_seed: u64,
    pub pvalue: PValueMode,
    pub basis: BasisSource,
    /// response noise, regression tasks only
    pub response_sigma_delta: Option<f64>,
}

pub(crate) const DEFAULT_REPS: usize = 50;

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.reps == 0 {
            return Err(HarnessError::InvalidArgument("reps must be >= 1".into()));
        }
        if self.n > self.n_total {
            return Err(HarnessError::InvalidArgument(format!(
                "n={} exceeds n_total={}",
                self.n, self.n_total
            )));
        }
        if self.scenarios.is_empty() {
            return Err(HarnessError::InvalidArgument("no scenarios".into()));
        }
        for sc in &self.scenarios {
            if sc.mu_grid.is_empty() {
                return Err(HarnessError::InvalidArgument(format!(
                    "scenario {} has an empty mu grid",
                    sc.id
                )));
            }
            if sc.khat == 0 || sc.k == 0 {
                return Err(HarnessError::InvalidArgument(format!(
                    "scenario {} needs positive K and Khat",
                    sc.id
                )));
            }
            sc.network.validate()?;
        }
        Ok(())
    }

    pub(crate) fn covariates_for(&self, sc: &ScenarioConfig, mu: f64) -> CovariateModelSpec {
        CovariateModelSpec {
            p: self.p,
            signal: SignalSet::Count {
                size: self.signal_size,
            },
            loading: sc.loading_at(mu),
            noise: sc.noise,
        }
    }

    fn base(task: TaskKind, scenarios: Vec<ScenarioConfig>, master_seed: u64) -> Self {
        ExperimentConfig {
            task,
            scenarios,
            n: 800,
            n_total: 1000,
            p: 1200,
            signal_size: 50,
            reps: DEFAULT_REPS,
            master_seed,
            pvalue: PValueMode::ChiSquare,
            basis: BasisSource::AdjacencyEigen,
            response_sigma_delta: None,
        }
    }

    /// The nine network-times-noise selection scenarios.
    pub fn fdr_default(master_seed: u64) -> Self {
        let mut scenarios = Vec::new();
        let noises = [
            ("a", NoiseFamily::GaussianUnit),
            ("b", NoiseFamily::WilsonHilfertyChi5),
            ("c", NoiseFamily::MixedSubGaussian),
        ];
        for (tag, noise) in noises {
            scenarios.push(ScenarioConfig {
                id: format!("dcsbm-{tag}"),
                network: NetworkModelSpec::dcsbm_default(),
                noise,
                loading: LoadingSampler::GaussianMixture { mu: 0.0, sd: 0.05 },
                mu_grid: vec![0.1, 0.2, 0.3, 0.4, 0.5],
                k: 3,
                khat: 3,
            });
            scenarios.push(ScenarioConfig {
                id: format!("dcmm-{tag}"),
                network: NetworkModelSpec::dcmm_default(),
                noise,
                loading: LoadingSampler::GaussianMixture { mu: 0.0, sd: 0.05 },
                mu_grid: vec![0.1, 0.2, 0.3, 0.4, 0.5],
                k: 3,
                khat: 3,
            });
            scenarios.push(ScenarioConfig {
                id: format!("rdpg-{tag}"),
                network: NetworkModelSpec::rdpg_default(),
                noise,
                loading: LoadingSampler::UniformMixture { lo: 0.05, mu: 0.0 },
                mu_grid: vec![0.05, 0.1, 0.15, 0.2, 0.3],
                k: 10,
                khat: 10,
            });
        }
        Self::base(TaskKind::FdrSweep, scenarios, master_seed)
    }

    /// Clustering scenarios: block-model network, three noise families.
    pub fn cluster_default(master_seed: u64) -> Self {
        let scenarios = [
            ("a", NoiseFamily::GaussianUnit),
            ("b", NoiseFamily::WilsonHilfertyChi5),
            ("c", NoiseFamily::MixedSubGaussian),
        ]
        .into_iter()
        .map(|(tag, noise)| ScenarioConfig {
            id: format!("dcsbm-{tag}"),
            network: NetworkModelSpec::dcsbm_default(),
            noise,
            loading: LoadingSampler::GaussianMixture { mu: 0.0, sd: 0.05 },
            mu_grid: vec![0.1, 0.3, 0.5],
            k: 3,
            khat: 3,
        })
        .collect();
        Self::base(TaskKind::Cluster, scenarios, master_seed)
    }

    /// Regression scenarios: dot-product network, three noise families.
    pub fn regression_default(master_seed: u64) -> Self {
        let scenarios = [
            ("a", NoiseFamily::GaussianUnit),
            ("b", NoiseFamily::WilsonHilfertyChi5),
            ("c", NoiseFamily::MixedSubGaussian),
        ]
        .into_iter()
        .map(|(tag, noise)| ScenarioConfig {
            id: format!("rdpg-{tag}"),
            network: NetworkModelSpec::rdpg_default(),
            noise,
            loading: LoadingSampler::UniformMixture { lo: 0.05, mu: 0.0 },
            mu_grid: vec![0.5, 1.0, 2.0],
            k: 10,
            khat: 10,
        })
        .collect();
        let mut cfg = Self::base(TaskKind::Regression, scenarios, master_seed);
        // response noise delta ~ N(0, 0.5), read as variance
        cfg.response_sigma_delta = Some(0.5f64.sqrt());
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        for cfg in [
            ExperimentConfig::fdr_default(7),
            ExperimentConfig::cluster_default(7),
            ExperimentConfig::regression_default(7),
        ] {
            cfg.validate().unwrap();
            let s = serde_json::to_string(&cfg).unwrap();
            let back: ExperimentConfig = serde_json::from_str(&s).unwrap();
            back.validate().unwrap();
            assert_eq!(back.scenarios.len(), cfg.scenarios.len());
        }
    }

    #[test]
    fn grid_value_replaces_loading_mu() {
        let sc = &ExperimentConfig::cluster_default(0).scenarios[0];
        match sc.loading_at(0.3) {
            LoadingSampler::GaussianMixture { mu, sd } => {
                assert_eq!(mu, 0.3);
                assert_eq!(sd, 0.05);
            }
            _ => panic!("wrong loading family"),
        }
    }

    #[test]
    fn empty_grid_rejected() {
        let mut cfg = ExperimentConfig::cluster_default(0);
        cfg.scenarios[0].mu_grid.clear();
        assert!(cfg.validate().is_err());
    }
}
