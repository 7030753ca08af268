use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::{HarnessError, ResultTable};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 32.0;
const MARGIN_B: f64 = 48.0;

const PALETTE: [&str; 6] = [
    "#1f6fb4", "#d45500", "#2e8b57", "#a02c9a", "#b8860b", "#555555",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    FdrVsMu,
    ErrorVsMu,
    HcCurve,
}

impl PlotKind {
    fn axis_labels(self) -> (&'static str, &'static str) {
        match self {
            PlotKind::FdrVsMu => ("mu", "FDR"),
            PlotKind::ErrorVsMu => ("mu", "error"),
            PlotKind::HcCurve => ("rank", "HC score"),
        }
    }
}

impl FromStr for PlotKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fdr_vs_mu" => Ok(PlotKind::FdrVsMu),
            "error_vs_mu" => Ok(PlotKind::ErrorVsMu),
            "hc_curve" => Ok(PlotKind::HcCurve),
            other => Err(HarnessError::InvalidArgument(format!(
                "unknown plot kind '{other}'; expected fdr_vs_mu, error_vs_mu or hc_curve"
            ))),
        }
    }
}

/// Fixed-precision coordinate formatting keeps the output byte-stable.
fn fx(v: f64) -> String {
    format!("{v:.2}")
}

fn ftick(v: f64) -> String {
    format!("{v:.3}")
}

/// Render a line chart, one polyline per method, x from the `mu` column and
/// y from the `mean` column.
pub fn render_plot(table: &ResultTable, kind: PlotKind) -> Result<String, HarnessError> {
    if table.rows.is_empty() {
        return Err(HarnessError::InvalidArgument("empty result table".into()));
    }
    // series keyed by "scenario/method" when several scenarios are present
    let multi_scenario = {
        let first = &table.rows[0].scenario;
        table.rows.iter().any(|r| &r.scenario != first)
    };
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for r in &table.rows {
        let key = if multi_scenario {
            format!("{}/{}", r.scenario, r.method)
        } else {
            r.method.clone()
        };
        match series.iter_mut().find(|(k, _)| *k == key) {
            Some((_, pts)) => pts.push((r.mu, r.mean)),
            None => series.push((key, vec![(r.mu, r.mean)])),
        }
    }
    for (_, pts) in series.iter_mut() {
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    }

    let xs: Vec<f64> = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.0)).collect();
    let ys: Vec<f64> = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.1)).collect();
    let (x0, x1) = padded_range(&xs);
    let (y0, y1) = padded_range(&ys);
    let sx = |v: f64| MARGIN_L + (v - x0) / (x1 - x0) * (WIDTH - MARGIN_L - MARGIN_R);
    let sy = |v: f64| HEIGHT - MARGIN_B - (v - y0) / (y1 - y0) * (HEIGHT - MARGIN_T - MARGIN_B);

    let (xlab, ylab) = kind.axis_labels();
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));

    // axes
    let ax0 = fx(MARGIN_L);
    let ay0 = fx(HEIGHT - MARGIN_B);
    svg.push_str(&format!(
        "  <line x1=\"{ax0}\" y1=\"{ay0}\" x2=\"{}\" y2=\"{ay0}\" stroke=\"black\"/>\n",
        fx(WIDTH - MARGIN_R)
    ));
    svg.push_str(&format!(
        "  <line x1=\"{ax0}\" y1=\"{ay0}\" x2=\"{ax0}\" y2=\"{}\" stroke=\"black\"/>\n",
        fx(MARGIN_T)
    ));

    // ticks: five per axis
    for i in 0..=4 {
        let tx = x0 + (x1 - x0) * i as f64 / 4.0;
        let px = fx(sx(tx));
        svg.push_str(&format!(
            "  <line x1=\"{px}\" y1=\"{ay0}\" x2=\"{px}\" y2=\"{}\" stroke=\"black\"/>\n",
            fx(HEIGHT - MARGIN_B + 5.0)
        ));
        svg.push_str(&format!(
            "  <text x=\"{px}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            fx(HEIGHT - MARGIN_B + 18.0),
            ftick(tx)
        ));
        let ty = y0 + (y1 - y0) * i as f64 / 4.0;
        let py = fx(sy(ty));
        svg.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{py}\" x2=\"{ax0}\" y2=\"{py}\" stroke=\"black\"/>\n",
            fx(MARGIN_L - 5.0)
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
            fx(MARGIN_L - 8.0),
            fx(sy(ty) + 4.0),
            ftick(ty)
        ));
    }

    // axis labels
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">{xlab}</text>\n",
        fx((MARGIN_L + WIDTH - MARGIN_R) / 2.0),
        fx(HEIGHT - 10.0)
    ));
    svg.push_str(&format!(
        "  <text x=\"16\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{ylab}</text>\n",
        fx((MARGIN_T + HEIGHT - MARGIN_B) / 2.0),
        fx((MARGIN_T + HEIGHT - MARGIN_B) / 2.0)
    ));

    // one polyline plus point markers per series
    for (si, (_, pts)) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        if pts.len() > 1 {
            let coords: Vec<String> = pts
                .iter()
                .map(|&(x, y)| format!("{},{}", fx(sx(x)), fx(sy(y))))
                .collect();
            svg.push_str(&format!(
                "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                coords.join(" ")
            ));
        }
        for &(x, y) in pts {
            svg.push_str(&format!(
                "  <circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{color}\"/>\n",
                fx(sx(x)),
                fx(sy(y))
            ));
        }
    }

    // legend
    let lx = WIDTH - MARGIN_R + 12.0;
    for (si, (name, _)) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let ly = MARGIN_T + 14.0 * si as f64;
        svg.push_str(&format!(
            "  <rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{color}\"/>\n",
            fx(lx),
            fx(ly)
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"11\">{}</text>\n",
            fx(lx + 14.0),
            fx(ly + 9.0),
            xml_escape(name)
        ));
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_plot(table: &ResultTable, kind: PlotKind, path: &Path) -> Result<(), HarnessError> {
    let svg = render_plot(table, kind)?;
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, svg)?;
    Ok(())
}

fn padded_range(vals: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in vals {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        // degenerate span: widen symmetrically
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.5 };
        return (lo - pad, hi + pad);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::ResultRow;

    fn row(scenario: &str, mu: f64, method: &str, mean: f64) -> ResultRow {
        ResultRow {
            scenario: scenario.into(),
            mu,
            method: method.into(),
            metric: "fdr".into(),
            mean,
            std: 0.0,
            reps: 1,
        }
    }

    #[test]
    fn single_point_single_marker() {
        let table = ResultTable {
            rows: vec![row("s", 0.3, "ngcs", 0.05)],
        };
        let svg = render_plot(&table, PlotKind::FdrVsMu).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert_eq!(svg.matches("<polyline").count(), 0);
    }

    #[test]
    fn two_methods_five_points_each() {
        let mut rows = Vec::new();
        for m in ["a", "b"] {
            for i in 0..5 {
                rows.push(row("s", 0.1 * (i + 1) as f64, m, 0.1 * i as f64));
            }
        }
        let table = ResultTable { rows };
        let svg = render_plot(&table, PlotKind::ErrorVsMu).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        for line in svg.lines().filter(|l| l.contains("<polyline")) {
            let pts = line.split("points=\"").nth(1).unwrap();
            let pts = pts.split('"').next().unwrap();
            assert_eq!(pts.split(' ').count(), 5);
        }
        assert_eq!(svg.matches("<circle").count(), 10);
    }

    #[test]
    fn deterministic_bytes() {
        let table = ResultTable {
            rows: vec![row("s", 0.1, "m", 0.4), row("s", 0.2, "m", 0.3)],
        };
        let a = render_plot(&table, PlotKind::FdrVsMu).unwrap();
        let b = render_plot(&table, PlotKind::FdrVsMu).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn balanced_tags_well_formed() {
        // every element in the output is self-closing except the svg root
        let table = ResultTable {
            rows: vec![row("s", 0.1, "m<&>", 0.4)],
        };
        let svg = render_plot(&table, PlotKind::HcCurve).unwrap();
        assert!(svg.starts_with("<svg "));
        assert!(svg.ends_with("</svg>\n"));
        for line in svg.lines() {
            let t = line.trim();
            if t.starts_with('<') && !t.starts_with("<svg") && !t.starts_with("</svg") {
                assert!(t.ends_with("/>") || t.ends_with("</text>"), "line: {t}");
            }
        }
        assert!(svg.contains("m&lt;&amp;&gt;"));
    }

    #[test]
    fn unknown_kind_string_rejected() {
        assert!("histogram".parse::<PlotKind>().is_err());
        assert!("fdr_vs_mu".parse::<PlotKind>().is_ok());
    }

    #[test]
    fn empty_table_rejected() {
        let table = ResultTable::default();
        assert!(render_plot(&table, PlotKind::FdrVsMu).is_err());
    }
}
