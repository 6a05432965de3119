use std::path::Path;

use super::atomic_write;
use crate::lab::{ExperimentReport, Row, Verdict};
use crate::{LabError, LabResult};

pub const HEADER: [&str; 9] = ["experiment", "param_key", "param_value", "resolution", "lhs", "rhs", "ratio", "verdict", "runtime_s"];

/// Seventeen significant digits, so values round-trip exactly.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn parse_number(s: &str) -> Option<f64> {
    match s {
        "nan" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

pub fn report_bytes(report: &ExperimentReport, record_runtime: bool, runtime_s: f64) -> LabResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER)?;
    for row in &report.rows {
        let runtime = if record_runtime { runtime_s } else { row.runtime_s };
        w.write_record([
            row.experiment.clone(),
            row.param_key.clone(),
            row.param_value.clone(),
            row.resolution.to_string(),
            format_number(row.lhs),
            format_number(row.rhs),
            format_number(row.ratio),
            row.verdict.name().to_string(),
            format_number(runtime),
        ])?;
    }
    w.into_inner().map_err(|e| LabError::Io(e.into_error()))
}

pub fn write_report(path: &Path, report: &ExperimentReport, record_runtime: bool, runtime_s: f64) -> LabResult<()> {
    atomic_write(path, &report_bytes(report, record_runtime, runtime_s)?)
}

/// One row per experiment: id, verdict, row count and the summary line.
pub fn summary_bytes(reports: &[ExperimentReport]) -> LabResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["experiment", "verdict", "rows", "summary"])?;
    for r in reports {
        w.write_record([r.id.as_str(), r.verdict.name(), &r.rows.len().to_string(), &r.summary])?;
    }
    w.into_inner().map_err(|e| LabError::Io(e.into_error()))
}

pub fn write_summary(path: &Path, reports: &[ExperimentReport]) -> LabResult<()> {
    atomic_write(path, &summary_bytes(reports)?)
}

pub fn read_report(path: &Path) -> LabResult<Vec<Row>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
    if header != HEADER {
        return Err(LabError::Config(format!("{}: unexpected header {header:?}", path.display())));
    }
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| LabError::Config(format!("{}: row {}: bad {what}", path.display(), line + 1));
        let num = |i: usize, what: &str| parse_number(&rec[i]).ok_or_else(|| bad(what));
        rows.push(Row {
            experiment: rec[0].to_string(),
            param_key: rec[1].to_string(),
            param_value: rec[2].to_string(),
            resolution: rec[3].parse().map_err(|_| bad("resolution"))?,
            lhs: num(4, "lhs")?,
            rhs: num(5, "rhs")?,
            ratio: num(6, "ratio")?,
            verdict: Verdict::parse(&rec[7]).ok_or_else(|| bad("verdict"))?,
            runtime_s: num(8, "runtime_s")?,
        });
    }
    Ok(rows)
}
