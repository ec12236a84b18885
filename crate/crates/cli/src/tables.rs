//! Text rendering of the result tables.
//!
//! Rows are methods (non-nested) and starred methods (nested); columns
//! are the seven KPIs. The best cell of each column carries a `*`
//! marker, the terminal-safe analog of bold.

use railbench_models::Family;
use railbench_pipeline::{CvReport, Scheme, KPI_NAMES};

use crate::baselines::{baseline_cell, Metric, Variant, BASELINE_LABEL};

pub fn fmt_metric(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let magnitude = v.abs();
    if (0.001..100000.0).contains(&magnitude) {
        format!("{v:.4}")
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    } else {
        let s = format!("{v:.2e}");
        match s.split_once('e') {
            Some((mantissa, exp)) => {
                let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
                format!("{mantissa}e{exp}")
            }
            None => s,
        }
    }
}

/// One displayable row: a method under one scheme.
struct Row {
    label: String,
    values: Vec<Option<f64>>,
}

fn collect_rows(
    reports: &[&CvReport],
    families: &[Family],
    metric: Metric,
) -> Vec<Row> {
    let mut rows = Vec::new();
    for &family in families {
        // non-nested first, then the starred nested variant
        for scheme in [Scheme::NonNested, Scheme::Nested] {
            for report in reports {
                if report.scheme != scheme {
                    continue;
                }
                if !report.families.contains_key(family.name())
                    && !report.disqualified.contains_key(family.name())
                {
                    continue;
                }
                let star = if scheme == Scheme::Nested { "*" } else { "" };
                let values = KPI_NAMES
                    .iter()
                    .map(|kpi| {
                        report.cell(family.name(), kpi).map(|c| match metric {
                            Metric::Mae => c.mae,
                            Metric::Mse => c.mse,
                        })
                    })
                    .collect();
                rows.push(Row {
                    label: format!("{}{}", family.name(), star),
                    values,
                });
            }
        }
    }
    rows
}

fn render(rows: &[Row], title: &str) -> String {
    let width = 11usize;
    let mut out = String::new();
    out.push_str(title);
    out.push('\n');
    out.push_str(&format!("{:<8}", "method"));
    for kpi in KPI_NAMES {
        out.push_str(&format!("{kpi:>width$}"));
    }
    out.push('\n');

    // best (lowest) value per column gets the marker
    let mut best: Vec<Option<f64>> = vec![None; KPI_NAMES.len()];
    for row in rows {
        for (j, v) in row.values.iter().enumerate() {
            if let Some(v) = v {
                if best[j].is_none_or(|b| *v < b) {
                    best[j] = Some(*v);
                }
            }
        }
    }
    for row in rows {
        out.push_str(&format!("{:<8}", row.label));
        for (j, v) in row.values.iter().enumerate() {
            let cell = match v {
                Some(v) => {
                    let marker = if Some(*v) == best[j] { "*" } else { "" };
                    format!("{}{}", fmt_metric(*v), marker)
                }
                None => "-".to_string(),
            };
            out.push_str(&format!("{cell:>width$}"));
        }
        out.push('\n');
    }
    out
}

/// The per-metric result tables for one or two schemes.
pub fn render_metric_tables(reports: &[&CvReport], families: &[Family]) -> String {
    let mut out = String::new();
    for metric in [Metric::Mae, Metric::Mse] {
        let rows = collect_rows(reports, families, metric);
        out.push_str(&render(&rows, &format!("{} (%)", metric.label())));
        out.push('\n');
    }
    out
}

/// Side-by-side comparison of computed numbers against the bundled
/// reference baselines.
pub fn render_baseline_comparison(reports: &[&CvReport], families: &[Family]) -> String {
    let width = 12usize;
    let mut out = String::new();
    for metric in [Metric::Mae, Metric::Mse] {
        out.push_str(&format!(
            "{} (%) - this run vs {BASELINE_LABEL}\n",
            metric.label()
        ));
        out.push_str(&format!("{:<8}", "method"));
        for kpi in KPI_NAMES {
            out.push_str(&format!("{kpi:>width$}{:>width$}", format!("{kpi}(ref)")));
        }
        out.push('\n');
        for &family in families {
            for (scheme, variant) in [
                (Scheme::NonNested, Variant::NonNested),
                (Scheme::Nested, Variant::Nested),
            ] {
                let Some(report) = reports.iter().find(|r| r.scheme == scheme) else {
                    continue;
                };
                let star = if scheme == Scheme::Nested { "*" } else { "" };
                out.push_str(&format!("{:<8}", format!("{}{}", family.name(), star)));
                for (j, kpi) in KPI_NAMES.iter().enumerate() {
                    let ours = report
                        .cell(family.name(), kpi)
                        .map(|c| match metric {
                            Metric::Mae => fmt_metric(c.mae),
                            Metric::Mse => fmt_metric(c.mse),
                        })
                        .unwrap_or_else(|| "-".to_string());
                    let reference = baseline_cell(metric, family, variant, j);
                    out.push_str(&format!("{ours:>width$}{reference:>width$}"));
                }
                out.push('\n');
            }
        }
        out.push('\n');
    }
    out
}
