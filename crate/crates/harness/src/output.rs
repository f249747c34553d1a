//! Report files: one series per check plus a summary.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use lieflow_core::report::CheckReport;
use serde::Serialize;

use crate::config::Format;

/// CSV header: `t, x1, x2, x3`, the residual components, `norm`.
pub fn csv_header(report: &CheckReport) -> Vec<String> {
    let mut h: Vec<String> = ["t", "x1", "x2", "x3"].iter().map(|s| s.to_string()).collect();
    h.extend(report.components.iter().cloned());
    h.push("norm".into());
    h
}

pub fn series_csv(report: &CheckReport) -> io::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(csv_header(report))?;
    for s in &report.samples {
        let mut row = vec![s.t, s.x[0], s.x[1], s.x[2]];
        row.extend(&s.residual);
        row.push(s.norm);
        w.write_record(row.iter().map(|v| format!("{v:e}")))?;
    }
    w.into_inner().map_err(|e| e.into_error())
}

pub fn series_json(report: &CheckReport) -> io::Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(report)?;
    v.push(b'\n');
    Ok(v)
}

/// Writes `<dir>/<check>.<ext>` and returns its path.
pub fn emit_series(report: &CheckReport, format: Format, dir: &Path) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let (bytes, ext) = match format {
        Format::Csv => (series_csv(report)?, "csv"),
        Format::Json => (series_json(report)?, "json"),
    };
    let path = dir.join(format!("{}.{ext}", report.check));
    fs::write(&path, bytes)?;
    Ok(path)
}

#[derive(Debug, Serialize)]
struct SummaryLine<'a> {
    check: &'a str,
    theorem: &'a str,
    passed: bool,
    max_residual: f64,
    tolerance: f64,
    samples: usize,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    flow: &'a str,
    seed: Option<u64>,
    passed: bool,
    checks: Vec<SummaryLine<'a>>,
}

/// Writes `<dir>/summary.json`.
pub fn write_summary(reports: &[CheckReport], flow: &str, dir: &Path) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let summary = Summary {
        flow,
        seed: reports.first().and_then(|r| r.seed),
        passed: reports.iter().all(|r| r.passed),
        checks: reports
            .iter()
            .map(|r| SummaryLine {
                check: &r.check,
                theorem: &r.theorem,
                passed: r.passed,
                max_residual: r.max_residual,
                tolerance: r.tolerance,
                samples: r.samples.len(),
            })
            .collect(),
    };
    let mut bytes = serde_json::to_vec_pretty(&summary)?;
    bytes.push(b'\n');
    let path = dir.join("summary.json");
    fs::write(&path, bytes)?;
    Ok(path)
}
