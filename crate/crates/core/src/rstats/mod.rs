//! Probability kernels and the Higher-Criticism machinery.

mod chi2;
mod hc;

pub use chi2::{chi2_cdf, chi2_sf};
pub use hc::{fdr, hc_scores, hct_select, HctOutcome};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::DenseMatrix;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// How screening statistics are converted to p-values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PValueMode {
    /// Exact chi-square survival p-value, valid under Gaussian noise.
    ChiSquare,
    /// Hanson-Wright tail bound, valid for sub-Gaussian noise.
    HansonWright {
        /// variance proxy sigma_sg^2
        sigma_sg2: f64,
        /// tail-bound constant, 0 < c <= 1
        c: f64,
    },
}

impl PValueMode {
    /// The sub-Gaussian mode with the explicit proof constant c = 1/96 and
    /// unit variance proxy.
    pub fn hanson_wright_default() -> Self {
        PValueMode::HansonWright {
            sigma_sg2: 1.0,
            c: 1.0 / 96.0,
        }
    }

    pub fn pvalue(&self, t: f64, khat: usize) -> f64 {
        match *self {
            PValueMode::ChiSquare => chi2_sf(t.max(0.0), khat).unwrap_or(1.0),
            PValueMode::HansonWright { sigma_sg2, c } => hw_pvalue_raw(t, khat, sigma_sg2, c),
        }
    }
}

impl Default for PValueMode {
    fn default() -> Self {
        PValueMode::ChiSquare
    }
}

/// Tail bound pi = min{ exp(-c min{(t-K)^2 / (K^2 s^4), (t-K)/s^2}), 1 }
/// where s^2 is the variance proxy. Returns 1 whenever t <= K.
pub fn hw_pvalue(t: f64, khat: usize, mode: &PValueMode) -> f64 {
    match *mode {
        PValueMode::HansonWright { sigma_sg2, c } => hw_pvalue_raw(t, khat, sigma_sg2, c),
        PValueMode::ChiSquare => chi2_sf(t.max(0.0), khat).unwrap_or(1.0),
    }
}

fn hw_pvalue_raw(t: f64, khat: usize, sigma_sg2: f64, c: f64) -> f64 {
    let k = khat as f64;
    let quad = (t - k) * (t - k) / (k * k * sigma_sg2 * sigma_sg2);
    let lin = (t - k) / sigma_sg2;
    let expo = quad.min(lin);
    (-c * expo).exp().min(1.0)
}

/// Full output of the selection pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionResult {
    /// screening statistics t_j
    pub t: Vec<f64>,
    /// p-values pi_j, covariate order
    pub pi: Vec<f64>,
    /// permutation sorting pi ascending (stable)
    pub order: Vec<usize>,
    /// HC scores over j in [1, p/2]
    pub hc: Vec<f64>,
    pub max_hc: f64,
    /// whether the no-signal test rejected (selection attempted)
    pub tested_nonempty: bool,
    /// p-value threshold T_thre
    pub threshold: f64,
    /// selected covariate indices, ascending
    pub selected: Vec<usize>,
}

impl SelectionResult {
    /// Restrict a matrix with p columns to the selected set.
    pub fn restrict(&self, x: &DenseMatrix) -> Result<DenseMatrix, crate::linalg::LinalgError> {
        x.select_columns(&self.selected)
    }
}
