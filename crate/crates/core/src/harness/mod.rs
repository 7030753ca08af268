//! Experiment orchestration: scenario configs, Monte-Carlo runners, dataset
//! I/O and SVG summaries.

mod config;
mod io;
mod plot;
mod runner;

pub use config::{ExperimentConfig, ScenarioConfig, TaskKind};
pub use io::{
    load_graph, load_matrix, save_matrix, save_results, table_from_csv, table_to_csv, LoadedGraph,
};
pub use plot::{emit_plot, render_plot, PlotKind};
pub use runner::{run_cluster_experiment, run_fdr_sweep, run_regression_experiment, run_task};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        /// 1-based
        line: usize,
        msg: String,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{failed} of {total} repetitions failed; first error: {first}")]
    TooManyFailures {
        failed: usize,
        total: usize,
        first: String,
    },
    #[error(transparent)]
    Gen(#[from] crate::netgen::GenError),
    #[error(transparent)]
    Select(#[from] crate::select::SelectError),
    #[error(transparent)]
    Downstream(#[from] crate::downstream::DownstreamError),
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

/// One aggregated cell of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scenario: String,
    pub mu: f64,
    pub method: String,
    pub metric: String,
    pub mean: f64,
    pub std: f64,
    pub reps: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn get(&self, scenario: &str, mu: f64, method: &str) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.scenario == scenario && r.mu == mu && r.method == method)
    }
}

/// Two-pass mean and population standard deviation.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.max(0.0).sqrt())
}
