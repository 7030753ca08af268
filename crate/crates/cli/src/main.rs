//! Command-line front end: covariate selection, clustering, regression,
//! the simulation harness and plotting, over CSV / Matrix Market files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ngcs_core::downstream::{ng_clu, ng_reg, DownstreamError};
use ngcs_core::harness::{
    emit_plot, load_graph, load_matrix, run_task, save_results, table_from_csv, ExperimentConfig,
    HarnessError, LoadedGraph, PlotKind, TaskKind,
};
use ngcs_core::linalg::LinalgError;
use ngcs_core::select::{
    build_basis_directed, build_basis_graph, ngcs_with_basis, standardize_columns, SelectError,
};
use ngcs_core::{BasisSource, PValueMode};

/// Exit status 2: malformed or inconsistent input.
const EXIT_INPUT: u8 = 2;
/// Exit status 3: a numerical routine failed to converge or degenerated.
const EXIT_NUMERIC: u8 = 3;

const THREADS_ENV: &str = "NGCS_THREADS";

#[derive(Parser)]
#[command(
    name = "ngcs",
    version,
    about = "Network-guided covariate selection and two-study clustering/regression"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select informative covariates from a network and a covariate matrix
    Select(SelectArgs),
    /// Cluster pooled subjects after network-guided selection
    Cluster(ClusterArgs),
    /// Fit the post-selection spectral regression and predict
    Regress(RegressArgs),
    /// Run a simulation experiment from a JSON config
    Simulate(SimulateArgs),
    /// Render a result table as an SVG line chart
    Plot(PlotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PvalueArg {
    /// chi-square survival p-values
    Chi2,
    /// Hanson-Wright sub-Gaussian tail bound
    Hw,
}

impl PvalueArg {
    fn mode(self) -> PValueMode {
        match self {
            PvalueArg::Chi2 => PValueMode::ChiSquare,
            PvalueArg::Hw => PValueMode::hanson_wright_default(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    /// top eigenvectors of the adjacency matrix
    Adj,
    /// top eigenvectors of the regularized Laplacian
    Lap,
    /// leading left singular vectors of a directed adjacency
    Dsvd,
}

#[derive(Args)]
struct SelectArgs {
    /// graph file: Matrix Market or "i,j" edge-list CSV
    #[arg(long)]
    graph: PathBuf,
    /// covariate matrix CSV, one subject per row
    #[arg(long)]
    covariates: PathBuf,
    /// projection rank
    #[arg(long)]
    khat: usize,
    #[arg(long, value_enum, default_value = "chi2")]
    pvalue: PvalueArg,
    #[arg(long, value_enum, default_value = "adj")]
    basis: BasisArg,
    /// z-score covariate columns before screening
    #[arg(long)]
    standardize: bool,
    #[arg(long, default_value = "0")]
    seed: u64,
    /// output JSON path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Study-1 covariates (rows = network nodes)
    #[arg(long)]
    covariates: PathBuf,
    /// pooled covariate matrix over all subjects
    #[arg(long)]
    pooled: PathBuf,
    /// number of clusters
    #[arg(long)]
    k: usize,
    #[arg(long)]
    khat: usize,
    #[arg(long, value_enum, default_value = "chi2")]
    pvalue: PvalueArg,
    #[arg(long, value_enum, default_value = "adj")]
    basis: BasisArg,
    #[arg(long, default_value = "0")]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RegressArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Study-1 covariates (rows = network nodes)
    #[arg(long)]
    covariates: PathBuf,
    /// Study-2 covariates (rows carry responses)
    #[arg(long)]
    study2: PathBuf,
    /// responses CSV: one value per row
    #[arg(long)]
    response: PathBuf,
    #[arg(long)]
    khat: usize,
    #[arg(long, value_enum, default_value = "chi2")]
    pvalue: PvalueArg,
    #[arg(long, value_enum, default_value = "adj")]
    basis: BasisArg,
    #[arg(long, default_value = "0")]
    seed: u64,
    /// optional matrix of new subjects to predict
    #[arg(long)]
    predict: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// experiment config JSON
    #[arg(long)]
    config: PathBuf,
    /// output directory for <task>.csv/.json/.svg
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PlotArgs {
    /// fdr_vs_mu, error_vs_mu or hc_curve
    #[arg(long)]
    kind: String,
    /// result table CSV as written by simulate
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

struct AppError {
    code: u8,
    msg: String,
}

impl AppError {
    fn input(msg: impl Into<String>) -> Self {
        AppError {
            code: EXIT_INPUT,
            msg: msg.into(),
        }
    }

    fn numeric(msg: impl Into<String>) -> Self {
        AppError {
            code: EXIT_NUMERIC,
            msg: msg.into(),
        }
    }
}

impl From<HarnessError> for AppError {
    fn from(e: HarnessError) -> Self {
        match &e {
            HarnessError::Linalg(LinalgError::NoConvergence { .. })
            | HarnessError::TooManyFailures { .. } => AppError::numeric(e.to_string()),
            _ => AppError::input(e.to_string()),
        }
    }
}

impl From<SelectError> for AppError {
    fn from(e: SelectError) -> Self {
        match &e {
            SelectError::Linalg(LinalgError::NoConvergence { .. }) => {
                AppError::numeric(e.to_string())
            }
            _ => AppError::input(e.to_string()),
        }
    }
}

impl From<DownstreamError> for AppError {
    fn from(e: DownstreamError) -> Self {
        match &e {
            DownstreamError::Linalg(LinalgError::NoConvergence { .. })
            | DownstreamError::EmptySelection => AppError::numeric(e.to_string()),
            DownstreamError::Select(SelectError::Linalg(LinalgError::NoConvergence { .. })) => {
                AppError::numeric(e.to_string())
            }
            _ => AppError::input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {}", e.msg);
        return ExitCode::from(e.code);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

fn configure_threads() -> Result<(), AppError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .map_err(|_| AppError::input(format!("{THREADS_ENV}={raw} is not a thread count")))?;
    if n == 0 {
        return Err(AppError::input(format!("{THREADS_ENV} must be >= 1")));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| AppError::input(format!("thread pool setup failed: {e}")))
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Select(a) => cmd_select(a),
        Command::Cluster(a) => cmd_cluster(a),
        Command::Regress(a) => cmd_regress(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Plot(a) => cmd_plot(a),
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), AppError> {
    match out {
        Some(p) => {
            if let Some(parent) = p.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)?;
                }
            }
            fs::write(p, text)?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

/// Load the graph and require it to be undirected unless the directed basis
/// was requested.
fn load_sym_graph(path: &Path) -> Result<ngcs_core::SparseSymGraph, AppError> {
    match load_graph(path, false)? {
        LoadedGraph::Sym(g) => Ok(g),
        LoadedGraph::Directed(_) => unreachable!("directed graphs are rejected when disallowed"),
    }
}

fn cmd_select(a: SelectArgs) -> Result<(), AppError> {
    let x = load_matrix(&a.covariates)?;
    let x = if a.standardize {
        standardize_columns(&x)
    } else {
        x
    };
    let mode = a.pvalue.mode();
    let basis = match a.basis {
        BasisArg::Adj => {
            let g = load_sym_graph(&a.graph)?;
            build_basis_graph(&g, a.khat, BasisSource::AdjacencyEigen, a.seed)?
        }
        BasisArg::Lap => {
            let g = load_sym_graph(&a.graph)?;
            build_basis_graph(&g, a.khat, BasisSource::LaplacianEigen, a.seed)?
        }
        BasisArg::Dsvd => match load_graph(&a.graph, true)? {
            LoadedGraph::Directed(g) => build_basis_directed(&g, a.khat, a.seed)?,
            LoadedGraph::Sym(_) => {
                return Err(AppError::input(
                    "the directed basis needs a directed edge set; this graph is symmetric",
                ))
            }
        },
    };
    if basis.n() != x.rows() {
        return Err(AppError::input(format!(
            "graph has {} nodes but the covariate matrix has {} rows",
            basis.n(),
            x.rows()
        )));
    }
    let sel = ngcs_with_basis(&basis, &x, &mode)?;
    let doc = serde_json::json!({
        "khat": basis.khat(),
        "tested_nonempty": sel.tested_nonempty,
        "max_hc": sel.max_hc,
        "threshold": sel.threshold,
        "selected": sel.selected,
        "t": sel.t,
        "pvalues": sel.pi,
    });
    write_or_print(a.out.as_deref(), &pretty(&doc)?)
}

fn cmd_cluster(a: ClusterArgs) -> Result<(), AppError> {
    let g = load_sym_graph(&a.graph)?;
    let x1 = load_matrix(&a.covariates)?;
    let pooled = load_matrix(&a.pooled)?;
    let out = ng_clu(
        &g,
        &x1,
        &pooled,
        a.k,
        a.khat,
        &a.pvalue.mode(),
        basis_source(a.basis)?,
        a.seed,
    )?;
    let doc = serde_json::json!({
        "labels": out.labels,
        "selected": out.selected,
        "fallback_full": out.fallback_full,
        "khat_used": out.khat_used,
    });
    write_or_print(a.out.as_deref(), &pretty(&doc)?)
}

fn cmd_regress(a: RegressArgs) -> Result<(), AppError> {
    let g = load_sym_graph(&a.graph)?;
    let x1 = load_matrix(&a.covariates)?;
    let x2 = load_matrix(&a.study2)?;
    let zmat = load_matrix(&a.response)?;
    if zmat.cols() != 1 {
        return Err(AppError::input(format!(
            "response file must have one column, found {}",
            zmat.cols()
        )));
    }
    let z: Vec<f64> = (0..zmat.rows()).map(|i| zmat.get(i, 0)).collect();
    let model = ng_reg(
        &g,
        &x1,
        &x2,
        &z,
        a.khat,
        &a.pvalue.mode(),
        basis_source(a.basis)?,
        a.seed,
    )?;
    let predictions: Option<Vec<f64>> = match &a.predict {
        Some(path) => {
            let xnew = load_matrix(path)?;
            let mut preds = Vec::with_capacity(xnew.rows());
            for i in 0..xnew.rows() {
                preds.push(model.predict(xnew.row(i))?);
            }
            Some(preds)
        }
        None => None,
    };
    let doc = serde_json::json!({
        "gamma_hat": model.gamma_hat,
        "selected": model.selected,
        "khat": model.khat,
        "p": model.p,
        "predictions": predictions,
    });
    write_or_print(a.out.as_deref(), &pretty(&doc)?)
}

fn basis_source(b: BasisArg) -> Result<BasisSource, AppError> {
    match b {
        BasisArg::Adj => Ok(BasisSource::AdjacencyEigen),
        BasisArg::Lap => Ok(BasisSource::LaplacianEigen),
        BasisArg::Dsvd => Err(AppError::input(
            "the directed basis is only available for `select`",
        )),
    }
}

fn cmd_simulate(a: SimulateArgs) -> Result<(), AppError> {
    let text = fs::read_to_string(&a.config)?;
    let config: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| AppError::input(format!("bad config {}: {e}", a.config.display())))?;
    config.validate()?;
    let table = run_task(&config)?;
    let stem = match config.task {
        TaskKind::FdrSweep => "fdr",
        TaskKind::Cluster => "cluster",
        TaskKind::Regression => "regression",
    };
    save_results(&a.out, stem, &table, &config)?;
    let kind = match config.task {
        TaskKind::FdrSweep => PlotKind::FdrVsMu,
        TaskKind::Cluster | TaskKind::Regression => PlotKind::ErrorVsMu,
    };
    emit_plot(&table, kind, &a.out.join(format!("{stem}.svg")))?;
    println!(
        "wrote {stem}.csv, {stem}.json, {stem}.svg under {}",
        a.out.display()
    );
    Ok(())
}

fn cmd_plot(a: PlotArgs) -> Result<(), AppError> {
    let kind: PlotKind = a
        .kind
        .parse()
        .map_err(|e: HarnessError| AppError::input(e.to_string()))?;
    let text = fs::read_to_string(&a.input)?;
    let table = table_from_csv(&a.input, &text)?;
    if table.rows.is_empty() {
        return Err(AppError::input(format!(
            "{}: no result rows",
            a.input.display()
        )));
    }
    emit_plot(&table, kind, &a.out)?;
    Ok(())
}

fn pretty(doc: &serde_json::Value) -> Result<String, AppError> {
    serde_json::to_string_pretty(doc).map_err(|e| AppError::input(e.to_string()))
}
