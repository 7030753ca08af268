use std::collections::HashSet;
use std::fs;
use std::path::Path;

use super::{HarnessError, ResultTable};
use crate::linalg::{DenseMatrix, DirectedGraph, SparseSymGraph};

#[derive(Debug, Clone)]
pub enum LoadedGraph {
    Sym(SparseSymGraph),
    Directed(DirectedGraph),
}

impl LoadedGraph {
    pub fn n(&self) -> usize {
        match self {
            LoadedGraph::Sym(g) => g.n(),
            LoadedGraph::Directed(g) => g.n(),
        }
    }
}

fn perr(path: &Path, line: usize, msg: impl Into<String>) -> HarnessError {
    HarnessError::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

/// Load a graph from Matrix Market coordinate format (header present) or an
/// edge-list CSV (one `i,j` pair per line, 0-based node ids).
///
/// Asymmetric edge sets are rejected unless `allow_directed` is set, in which
/// case a directed graph is returned.
pub fn load_graph(path: &Path, allow_directed: bool) -> Result<LoadedGraph, HarnessError> {
    let text = fs::read_to_string(path)?;
    if text.trim_start().starts_with("%%MatrixMarket") {
        load_matrix_market(path, &text, allow_directed)
    } else {
        load_edge_list(path, &text, allow_directed)
    }
}

fn load_matrix_market(
    path: &Path,
    text: &str,
    allow_directed: bool,
) -> Result<LoadedGraph, HarnessError> {
    let mut lines = text.lines().enumerate();
    let (lno, header) = lines.next().ok_or_else(|| perr(path, 1, "empty file"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() < 5 || head[1] != "matrix" || head[2] != "coordinate" {
        return Err(perr(path, lno + 1, "expected 'matrix coordinate' header"));
    }
    let symmetric = match head[4] {
        "symmetric" => true,
        "general" => false,
        other => return Err(perr(path, lno + 1, format!("unsupported symmetry '{other}'"))),
    };
    let has_value = match head[3] {
        "pattern" => false,
        "real" | "integer" => true,
        other => return Err(perr(path, lno + 1, format!("unsupported field '{other}'"))),
    };

    // size line: first non-comment line
    let mut n = 0usize;
    let mut nnz = 0usize;
    let mut size_seen = false;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    for (idx, raw) in lines {
        let lno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        if !size_seen {
            if tok.len() != 3 {
                return Err(perr(path, lno, "size line must be 'rows cols nnz'"));
            }
            let rows: usize = tok[0]
                .parse()
                .map_err(|_| perr(path, lno, "bad row count"))?;
            let cols: usize = tok[1]
                .parse()
                .map_err(|_| perr(path, lno, "bad column count"))?;
            if rows != cols {
                return Err(perr(path, lno, "adjacency matrix must be square"));
            }
            n = rows;
            nnz = tok[2]
                .parse()
                .map_err(|_| perr(path, lno, "bad entry count"))?;
            size_seen = true;
            continue;
        }
        let need = if has_value { 3 } else { 2 };
        if tok.len() < need {
            return Err(perr(path, lno, format!("expected {need} fields")));
        }
        let i: usize = tok[0].parse().map_err(|_| perr(path, lno, "bad node id"))?;
        let j: usize = tok[1].parse().map_err(|_| perr(path, lno, "bad node id"))?;
        if i == 0 || j == 0 || i > n || j > n {
            return Err(perr(path, lno, format!("node id out of range 1..={n}")));
        }
        let e = (i - 1, j - 1);
        if !seen.insert(e) {
            return Err(perr(path, lno, format!("duplicate edge ({i},{j})")));
        }
        edges.push(e);
    }
    if !size_seen {
        return Err(perr(path, 1, "missing size line"));
    }
    if edges.len() != nnz {
        return Err(perr(
            path,
            1,
            format!("header promised {nnz} entries, found {}", edges.len()),
        ));
    }
    if symmetric {
        // stored triangle only; drop diagonal entries (self-loops)
        let und: Vec<(usize, usize)> = edges.into_iter().filter(|&(a, b)| a != b).collect();
        Ok(LoadedGraph::Sym(SparseSymGraph::from_edges(n, und)?))
    } else {
        finish_general(path, n, edges, allow_directed)
    }
}

fn load_edge_list(
    path: &Path,
    text: &str,
    allow_directed: bool,
) -> Result<LoadedGraph, HarnessError> {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut n = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let lno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',');
        let a = parts
            .next()
            .and_then(|t| t.trim().parse::<usize>().ok())
            .ok_or_else(|| perr(path, lno, "expected 'i,j' with integer node ids"))?;
        let b = parts
            .next()
            .and_then(|t| t.trim().parse::<usize>().ok())
            .ok_or_else(|| perr(path, lno, "expected 'i,j' with integer node ids"))?;
        if parts.next().is_some() {
            return Err(perr(path, lno, "expected exactly two fields"));
        }
        if !seen.insert((a, b)) {
            return Err(perr(path, lno, format!("duplicate edge ({a},{b})")));
        }
        n = n.max(a + 1).max(b + 1);
        edges.push((a, b));
    }
    finish_general(path, n, edges, allow_directed)
}

/// Decide symmetric vs directed for an unordered-pair-ambiguous edge set.
fn finish_general(
    path: &Path,
    n: usize,
    edges: Vec<(usize, usize)>,
    allow_directed: bool,
) -> Result<LoadedGraph, HarnessError> {
    let set: HashSet<(usize, usize)> = edges.iter().copied().collect();
    // symmetric means every pair appears in both orientations, no self-loops
    let asym = edges.iter().any(|&(a, b)| a == b || !set.contains(&(b, a)));
    if asym {
        if !allow_directed {
            return Err(perr(
                path,
                1,
                "edge set is not symmetric; directed input needs the directed basis",
            ));
        }
        Ok(LoadedGraph::Directed(DirectedGraph::from_edges(n, edges)?))
    } else {
        let und: Vec<(usize, usize)> = edges.into_iter().filter(|&(a, b)| a < b).collect();
        Ok(LoadedGraph::Sym(SparseSymGraph::from_edges(n, und)?))
    }
}

/// Headerless CSV, one subject per row.
pub fn load_matrix(path: &Path) -> Result<DenseMatrix, HarnessError> {
    let text = fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, raw) in text.lines().enumerate() {
        let lno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(|t| t.trim().parse::<f64>()).collect();
        let row = row.map_err(|_| perr(path, lno, "non-numeric field"))?;
        if let Some(w) = width {
            if row.len() != w {
                return Err(perr(
                    path,
                    lno,
                    format!("row has {} fields, expected {w}", row.len()),
                ));
            }
        } else {
            width = Some(row.len());
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(perr(path, 1, "empty matrix"));
    }
    DenseMatrix::from_rows(&rows).map_err(HarnessError::from)
}

/// Print with 17 significant digits, enough for exact f64 round-trips.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn save_matrix(path: &Path, x: &DenseMatrix) -> Result<(), HarnessError> {
    let mut out = String::new();
    for i in 0..x.rows() {
        let row: Vec<String> = x.row(i).iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Render the aggregate table as CSV text.
pub fn table_to_csv(table: &ResultTable) -> String {
    let mut out = String::from("scenario,mu,method,metric,mean,std,reps\n");
    for r in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.scenario,
            fmt_f64(r.mu),
            r.method,
            r.metric,
            fmt_f64(r.mean),
            fmt_f64(r.std),
            r.reps
        ));
    }
    out
}

/// Parse a table written by `table_to_csv`.
pub fn table_from_csv(path: &Path, text: &str) -> Result<ResultTable, HarnessError> {
    let mut table = ResultTable::default();
    for (idx, raw) in text.lines().enumerate() {
        let lno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || lno == 1 {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(perr(path, lno, format!("expected 7 fields, got {}", f.len())));
        }
        table.rows.push(super::ResultRow {
            scenario: f[0].to_string(),
            mu: f[1].parse().map_err(|_| perr(path, lno, "bad mu"))?,
            method: f[2].to_string(),
            metric: f[3].to_string(),
            mean: f[4].parse().map_err(|_| perr(path, lno, "bad mean"))?,
            std: f[5].parse().map_err(|_| perr(path, lno, "bad std"))?,
            reps: f[6].parse().map_err(|_| perr(path, lno, "bad rep count"))?,
        });
    }
    Ok(table)
}

/// Persist a result table as CSV plus a JSON document carrying the full
/// config for provenance.
pub fn save_results<C: serde::Serialize>(
    dir: &Path,
    stem: &str,
    table: &ResultTable,
    config: &C,
) -> Result<(), HarnessError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(format!("{stem}.csv")), table_to_csv(table))?;
    let doc = serde_json::json!({
        "config": config,
        "results": table,
    });
    fs::write(
        dir.join(format!("{stem}.json")),
        serde_json::to_string_pretty(&doc)?,
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::ResultRow;

    fn tmpfile(name: &str, content: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("ngcs-io-{}-{name}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join(name);
        fs::write(&p, content).unwrap();
        p
    }

    #[test]
    fn matrix_market_triangle() {
        let p = tmpfile(
            "tri.mtx",
            "%%MatrixMarket matrix coordinate pattern symmetric\n% a triangle\n3 3 3\n2 1\n3 1\n3 2\n",
        );
        let g = load_graph(&p, false).unwrap();
        let LoadedGraph::Sym(g) = g else { panic!("expected symmetric") };
        assert_eq!(g.n(), 3);
        assert_eq!(g.degrees(), &[2, 2, 2]);
    }

    #[test]
    fn edge_list_duplicate_names_line() {
        let p = tmpfile("dup.csv", "0,1\n1,0\n2,1\n1,0\n");
        let err = load_graph(&p, false).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains(":4:"), "got {msg}");
        assert!(msg.contains("duplicate"), "got {msg}");
    }

    #[test]
    fn asymmetric_needs_directed_mode() {
        let p = tmpfile("asym.csv", "0,1\n1,2\n");
        assert!(load_graph(&p, false).is_err());
        let g = load_graph(&p, true).unwrap();
        assert!(matches!(g, LoadedGraph::Directed(_)));
    }

    #[test]
    fn symmetric_edge_list_both_orientations() {
        let p = tmpfile("sym.csv", "0,1\n1,0\n1,2\n2,1\n");
        let g = load_graph(&p, false).unwrap();
        let LoadedGraph::Sym(g) = g else { panic!() };
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn matrix_round_trip_bit_exact() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|_| (0..20).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect())
            .collect();
        let x = DenseMatrix::from_rows(&rows).unwrap();
        let dir = std::env::temp_dir().join(format!("ngcs-io-rt-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join("m.csv");
        save_matrix(&p, &x).unwrap();
        let back = load_matrix(&p).unwrap();
        assert_eq!(back.rows(), 50);
        for i in 0..50 {
            for j in 0..20 {
                assert_eq!(back.get(i, j).to_bits(), x.get(i, j).to_bits());
            }
        }
    }

    #[test]
    fn csv_table_round_trip() {
        let table = ResultTable {
            rows: vec![ResultRow {
                scenario: "dcsbm-a".into(),
                mu: 0.3,
                method: "ng_clu".into(),
                metric: "clustering_error".into(),
                mean: 0.066_199_999_999_999_99,
                std: 0.01,
                reps: 50,
            }],
        };
        let text = table_to_csv(&table);
        let back = table_from_csv(Path::new("mem"), &text).unwrap();
        assert_eq!(back, table);
    }

    #[test]
    fn bad_matrix_line_number_reported() {
        let p = tmpfile("bad.csv", "1.0,2.0\n3.0,oops\n");
        let err = load_matrix(&p).unwrap_err();
        assert!(err.to_string().contains(":2:"), "got {err}");
    }
}
