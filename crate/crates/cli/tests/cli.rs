//! End-to-end tests of the `ngcs` binary on small synthetic inputs.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ngcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ngcs"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Two 10-node cliques joined by one bridge edge, as an edge-list CSV.
fn write_two_clique_graph(path: &Path) {
    let mut lines = Vec::new();
    let mut push = |a: usize, b: usize| {
        lines.push(format!("{a},{b}"));
        lines.push(format!("{b},{a}"));
    };
    for block in 0..2 {
        let base = block * 10;
        for i in 0..10 {
            for j in (i + 1)..10 {
                push(base + i, base + j);
            }
        }
    }
    push(9, 10);
    fs::write(path, lines.join("\n") + "\n").unwrap();
}

/// 20 x 12 covariates: columns 2 and 7 follow the community split with a
/// large offset, the rest are small deterministic pseudo-noise.
fn write_covariates(path: &Path, rows: usize) {
    let mut out = String::new();
    for i in 0..rows {
        let sign = if (i / 10) % 2 == 0 { 1.0 } else { -1.0 };
        let mut vals = Vec::new();
        for j in 0..12 {
            let noise = (((i * 31 + j * 17) % 13) as f64 - 6.0) / 20.0;
            let v = if j == 2 || j == 7 {
                sign * 5.0 + noise
            } else {
                noise
            };
            vals.push(format!("{v}"));
        }
        out.push_str(&vals.join(","));
        out.push('\n');
    }
    fs::write(path, out).unwrap();
}

#[test]
fn select_finds_planted_columns() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.csv");
    let x = dir.path().join("x.csv");
    write_two_clique_graph(&graph);
    write_covariates(&x, 20);
    let out_path = dir.path().join("sel.json");
    let out = ngcs(&[
        "select",
        "--graph",
        graph.to_str().unwrap(),
        "--covariates",
        x.to_str().unwrap(),
        "--khat",
        "2",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    let selected: Vec<u64> = doc["selected"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert!(selected.contains(&2) && selected.contains(&7), "{selected:?}");
    assert_eq!(doc["khat"], 2);
}

#[test]
fn cluster_recovers_two_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.csv");
    let x = dir.path().join("x.csv");
    let pooled = dir.path().join("pooled.csv");
    write_two_clique_graph(&graph);
    write_covariates(&x, 20);
    write_covariates(&pooled, 40);
    let out = ngcs(&[
        "cluster",
        "--graph",
        graph.to_str().unwrap(),
        "--covariates",
        x.to_str().unwrap(),
        "--pooled",
        pooled.to_str().unwrap(),
        "--k",
        "2",
        "--khat",
        "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let labels: Vec<u64> = doc["labels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(labels.len(), 40);
    // subjects sharing a planted sign must share a label
    for chunk in labels.chunks(10) {
        assert!(chunk.iter().all(|&l| l == chunk[0]), "{labels:?}");
    }
    assert_eq!(labels[0] != labels[10], true);
    assert_eq!(doc["fallback_full"], false);
}

#[test]
fn regress_predicts_linear_response() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.csv");
    let x1 = dir.path().join("x1.csv");
    let x2 = dir.path().join("x2.csv");
    let zf = dir.path().join("z.csv");
    write_two_clique_graph(&graph);
    write_covariates(&x1, 20);
    write_covariates(&x2, 20);
    // response depends only on the planted columns: z = x[2] - 0.5 x[7]
    let x2_text = fs::read_to_string(&x2).unwrap();
    let mut zlines = Vec::new();
    for line in x2_text.lines() {
        let v: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
        zlines.push(format!("{}", v[2] - 0.5 * v[7]));
    }
    fs::write(&zf, zlines.join("\n") + "\n").unwrap();
    let out = ngcs(&[
        "regress",
        "--graph",
        graph.to_str().unwrap(),
        "--covariates",
        x1.to_str().unwrap(),
        "--study2",
        x2.to_str().unwrap(),
        "--response",
        zf.to_str().unwrap(),
        "--khat",
        "2",
        "--predict",
        x1.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let preds = doc["predictions"].as_array().unwrap();
    assert_eq!(preds.len(), 20);
    let x1_text = fs::read_to_string(&x1).unwrap();
    for (line, pred) in x1_text.lines().zip(preds) {
        let v: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
        let target = v[2] - 0.5 * v[7];
        let got = pred.as_f64().unwrap();
        assert!((got - target).abs() < 0.35, "pred {got} target {target}");
    }
}

#[test]
fn simulate_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    // a pared-down clustering experiment so the test stays fast
    let mut cfg = ngcs_core::harness::ExperimentConfig::cluster_default(7);
    cfg.n = 100;
    cfg.n_total = 120;
    cfg.p = 40;
    cfg.signal_size = 8;
    cfg.reps = 2;
    cfg.scenarios.truncate(1);
    cfg.scenarios[0].mu_grid = vec![2.0];
    fs::write(&cfg_path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out_dir in [&out_a, &out_b] {
        let out = Command::new(env!("CARGO_BIN_EXE_ngcs"))
            .env("NGCS_THREADS", "2")
            .args([
                "simulate",
                "--config",
                cfg_path.to_str().unwrap(),
                "--out",
                out_dir.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["cluster.csv", "cluster.json", "cluster.svg"] {
        let a = fs::read(out_a.join(name)).unwrap();
        let b = fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
        assert!(!a.is_empty());
    }
}

#[test]
fn plot_renders_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    fs::write(
        &csv,
        "scenario,mu,method,metric,mean,std,reps\n\
         s1,1.0000000000000000e0,ngcs_hct,fdr,2.0000000000000001e-1,1.0000000000000001e-1,5\n\
         s1,2.0000000000000000e0,ngcs_hct,fdr,1.0000000000000001e-1,5.0000000000000003e-2,5\n",
    )
    .unwrap();
    let svg = dir.path().join("fig.svg");
    let out = ngcs(&[
        "plot",
        "--kind",
        "fdr_vs_mu",
        "--in",
        csv.to_str().unwrap(),
        "--out",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert!(text.contains("polyline"));
}

#[test]
fn bad_inputs_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    let out = ngcs(&[
        "select",
        "--graph",
        missing.to_str().unwrap(),
        "--covariates",
        missing.to_str().unwrap(),
        "--khat",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // row-count mismatch between graph and covariates
    let graph = dir.path().join("g.csv");
    let x = dir.path().join("x.csv");
    write_two_clique_graph(&graph);
    write_covariates(&x, 25);
    let out = ngcs(&[
        "select",
        "--graph",
        graph.to_str().unwrap(),
        "--covariates",
        x.to_str().unwrap(),
        "--khat",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rows"));

    // malformed plot kind
    let out = ngcs(&["plot", "--kind", "nonsense", "--in", "x", "--out", "y"]);
    assert_eq!(out.status.code(), Some(2));
}
