//! The three subcommands.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use railbench_dataset::{read_csv_file, sweep, write_csv_file, Grid};
use railbench_models::Family;
use railbench_pipeline::{nested_cv, nonnested_cv, CvReport, Scheme, KPI_NAMES};
use railbench_sim_core::SimConfig;

use crate::baselines::Metric;
use crate::error::CliError;
use crate::svg::{render_bar_chart, Bar};
use crate::tables::{render_baseline_comparison, render_metric_tables};
use crate::SchemeArg;

const DEFAULT_SEED: u64 = 42;
pub const SEED_ENV: &str = "RAILBENCH_SEED";

/// Flag beats environment beats the per-command default.
pub fn resolve_seed(flag: Option<u64>) -> Result<Option<u64>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text
            .parse::<u64>()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{SEED_ENV} must be a 64-bit integer, got {text:?}"))),
        Err(_) => Ok(None),
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut file = std::fs::File::create(&tmp)
        .map_err(|e| CliError::Data(format!("{}: {e}", tmp.display())))?;
    file.write_all(bytes)
        .and_then(|_| file.flush())
        .map_err(|e| CliError::Data(format!("{}: {e}", tmp.display())))?;
    drop(file);
    std::fs::rename(&tmp, path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn normalized_values(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values.dedup();
    values
}

pub fn cmd_sweep(
    config: Option<PathBuf>,
    out: PathBuf,
    hom: Option<Vec<f64>>,
    ttt: Option<Vec<f64>>,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let mut base = match config {
        Some(path) => SimConfig::from_file(path)?,
        None => SimConfig::default(),
    };
    if let Some(seed) = resolve_seed(seed)? {
        base.seed = seed;
    }
    let default_grid = Grid::default();
    let grid = Grid {
        hom_values: hom.map(normalized_values).unwrap_or(default_grid.hom_values),
        ttt_values: ttt.map(normalized_values).unwrap_or(default_grid.ttt_values),
    };

    let started = Instant::now();
    let dataset = sweep(&grid, &base)?;
    write_csv_file(&dataset, &out)?;
    println!(
        "wrote {} rows to {} in {:.2}s",
        dataset.n_rows(),
        out.display(),
        started.elapsed().as_secs_f64()
    );
    Ok(())
}

fn parse_families(filter: Option<Vec<String>>) -> Result<Vec<Family>, CliError> {
    match filter {
        None => Ok(Family::ALL.to_vec()),
        Some(names) => {
            let mut unknown = Vec::new();
            let mut families = Vec::new();
            for name in names {
                match Family::parse(&name) {
                    Some(f) if !families.contains(&f) => families.push(f),
                    Some(_) => {}
                    None => unknown.push(name),
                }
            }
            if !unknown.is_empty() {
                return Err(CliError::Usage(format!(
                    "unknown families: {}; valid names: {}",
                    unknown.join(", "),
                    Family::ALL.map(|f| f.name()).join(", ")
                )));
            }
            if families.is_empty() {
                return Err(CliError::Usage("family filter is empty".into()));
            }
            Ok(families)
        }
    }
}

/// "report.json" + nested -> "report.nested.json"
fn scheme_path(base: &Path, scheme: Scheme) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".to_string());
    let ext = base
        .extension()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "json".to_string());
    base.with_file_name(format!("{stem}.{}.{ext}", scheme.label()))
}

pub fn cmd_evaluate(
    dataset_path: PathBuf,
    scheme: SchemeArg,
    families: Option<Vec<String>>,
    seed: Option<u64>,
    out: PathBuf,
) -> Result<(), CliError> {
    let families = parse_families(families)?;
    let seed = resolve_seed(seed)?.unwrap_or(DEFAULT_SEED);
    let dataset = read_csv_file(&dataset_path)?;
    if dataset.n_rows() < 12 {
        return Err(CliError::Data(format!(
            "dataset has {} rows; the fold plans need at least 12",
            dataset.n_rows()
        )));
    }

    let grids: BTreeMap<Family, _> = families
        .iter()
        .map(|&f| (f, f.default_grid()))
        .collect();

    let mut reports: Vec<CvReport> = Vec::new();
    if matches!(scheme, SchemeArg::Nested | SchemeArg::Both) {
        reports.push(nested_cv(&grids, &dataset, 6, 4, seed)?);
    }
    if matches!(scheme, SchemeArg::NonNested | SchemeArg::Both) {
        reports.push(nonnested_cv(&grids, &dataset, 10, seed)?);
    }

    for report in &reports {
        let path = if reports.len() == 1 {
            out.clone()
        } else {
            scheme_path(&out, report.scheme)
        };
        write_atomic(&path, report.to_json_pretty()?.as_bytes())?;
        println!("wrote {} report to {}", report.scheme.label(), path.display());
    }

    let refs: Vec<&CvReport> = reports.iter().collect();
    print!("{}", render_metric_tables(&refs, &families));
    Ok(())
}

/// Best (lowest) value per KPI across every family and report, with the
/// winning method label.
fn best_per_kpi(reports: &[&CvReport], metric: Metric) -> Vec<Bar> {
    KPI_NAMES
        .iter()
        
        .map(|kpi| {
            let mut best: Option<(f64, String)> = None;
            for report in reports {
                let star = if report.scheme == Scheme::Nested { "*" } else { "" };
                for family in Family::ALL {
                    if let Some(cell) = report.cell(family.name(), kpi) {
                        let v = match metric {
                            Metric::Mae => cell.mae,
                            Metric::Mse => cell.mse,
                        };
                        if best.as_ref().is_none_or(|(b, _)| v < *b) {
                            best = Some((v, format!("{}{}", family.name(), star)));
                        }
                    }
                }
            }
            let (value, method) = best.unwrap_or((0.0, "-".to_string()));
            Bar {
                kpi: kpi.to_string(),
                method,
                value,
            }
        })
        .collect()
}

pub fn cmd_report(
    report_paths: Vec<PathBuf>,
    baseline: bool,
    svg: Option<PathBuf>,
) -> Result<(), CliError> {
    let mut reports = Vec::new();
    for path in &report_paths {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        reports.push(
            CvReport::from_json(&text)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?,
        );
    }
    let refs: Vec<&CvReport> = reports.iter().collect();

    print!("{}", render_metric_tables(&refs, &Family::ALL));
    if baseline {
        print!("{}", render_baseline_comparison(&refs, &Family::ALL));
    }

    if let Some(svg_base) = svg {
        for metric in [Metric::Mae, Metric::Mse] {
            let bars = best_per_kpi(&refs, metric);
            let chart = render_bar_chart(
                &format!("Best method per KPI, {} (%)", metric.label()),
                &bars,
            );
            let path = scheme_suffix_path(&svg_base, metric);
            write_atomic(&path, chart.as_bytes())?;
            println!("wrote {} chart to {}", metric.label(), path.display());
        }
    }
    Ok(())
}

fn scheme_suffix_path(base: &Path, metric: Metric) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "chart".to_string());
    let ext = base
        .extension()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "svg".to_string());
    base.with_file_name(format!("{stem}.{}.{ext}", metric.label().to_lowercase()))
}
