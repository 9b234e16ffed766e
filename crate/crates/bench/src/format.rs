//! Trace, summary and dataset files.
//!
//! All three are comma-separated with a header row. Lines starting with `#`
//! are comments. A trace may carry `# key: value` metadata before the header
//! and ends with `# diverged at step N` when its run diverged. Floats are
//! written in shortest round-trip form, so reading a file back is exact.

use std::io::{Read, Write};

use mas_core::problems::SyntheticDataset;

use crate::error::FormatError;
use crate::grid::SummaryRow;
use crate::run::{RunTrace, TraceRecord};

/// Fixed leading trace columns; `p0`, `p1`, … follow when snapshots exist.
pub const TRACE_COLUMNS: [&str; 5] = ["step", "epoch", "loss", "step_norm", "effective_lr"];

pub const SUMMARY_COLUMNS: [&str; 9] = [
    "label",
    "optimizer",
    "lambda_a",
    "lambda_s",
    "metric",
    "metric_avg",
    "metric_max",
    "n_runs",
    "n_diverged",
];

const DIVERGED_PREFIX: &str = "# diverged at step ";

#[derive(Debug, Clone, PartialEq)]
pub struct TraceFile {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub records: Vec<TraceRecord>,
    pub diverged_at: Option<u64>,
}

impl TraceFile {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Number of `p` columns.
    pub fn param_count(&self) -> usize {
        self.columns.len() - TRACE_COLUMNS.len()
    }
}

pub fn trace_columns(param_count: usize) -> Vec<String> {
    TRACE_COLUMNS
        .iter()
        .map(|c| c.to_string())
        .chain((0..param_count).map(|i| format!("p{i}")))
        .collect()
}

pub fn write_trace<W: Write>(
    mut out: W,
    trace: &RunTrace,
    meta: &[(&str, String)],
) -> Result<(), FormatError> {
    for (k, v) in meta {
        writeln!(out, "# {k}: {v}")?;
    }
    let params = trace
        .records
        .first()
        .and_then(|r| r.params.as_ref())
        .map_or(0, Vec::len);
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record(trace_columns(params))?;
    for r in &trace.records {
        let mut row = vec![
            r.step.to_string(),
            r.epoch.to_string(),
            r.loss.to_string(),
            r.step_norm.to_string(),
            r.effective_lr.to_string(),
        ];
        if let Some(p) = &r.params {
            row.extend(p.iter().map(f64::to_string));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    drop(w);
    if let Some(step) = trace.diverged_at {
        writeln!(out, "{DIVERGED_PREFIX}{step}")?;
    }
    Ok(())
}

fn parse<T: std::str::FromStr>(value: &str, column: &str, line: u64) -> Result<T, FormatError> {
    value.trim().parse().map_err(|_| FormatError::Value {
        line,
        column: column.to_string(),
        value: value.to_string(),
    })
}

pub fn read_trace<R: Read>(mut input: R) -> Result<TraceFile, FormatError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;

    let mut meta = Vec::new();
    let mut diverged_at = None;
    for (i, line) in text.lines().enumerate() {
        if let Some(rest) = line.strip_prefix(DIVERGED_PREFIX) {
            diverged_at = Some(parse(rest, "diverged", i as u64 + 1)?);
        } else if let Some(rest) = line.strip_prefix("# ") {
            if let Some((k, v)) = rest.split_once(": ") {
                meta.push((k.to_string(), v.to_string()));
            }
        }
    }

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let columns: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let params = columns.len().saturating_sub(TRACE_COLUMNS.len());
    if columns != trace_columns(params) {
        return Err(FormatError::Schema(format!(
            "expected {}, found {}",
            trace_columns(params).join(","),
            columns.join(",")
        )));
    }

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let get = |i: usize| row.get(i).unwrap_or("");
        let p: Vec<f64> = (0..params)
            .map(|j| parse(get(5 + j), &columns[5 + j], line))
            .collect::<Result<_, _>>()?;
        records.push(TraceRecord {
            step: parse(get(0), "step", line)?,
            epoch: parse(get(1), "epoch", line)?,
            loss: parse(get(2), "loss", line)?,
            step_norm: parse(get(3), "step_norm", line)?,
            effective_lr: parse(get(4), "effective_lr", line)?,
            params: (params > 0).then_some(p),
        });
    }
    Ok(TraceFile {
        meta,
        columns,
        records,
        diverged_at,
    })
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

pub fn write_summary<W: Write>(out: W, rows: &[SummaryRow]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.label.clone(),
            r.optimizer.to_string(),
            r.lambda_a.to_string(),
            r.lambda_s.to_string(),
            r.metric.as_str().to_string(),
            opt(r.metric_avg),
            opt(r.metric_max),
            r.n_runs.to_string(),
            r.n_diverged.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// The summary as a fixed-width text table, one row per line.
pub fn summary_table(rows: &[SummaryRow]) -> String {
    let (avg, max) = match rows.first().map(|r| r.metric) {
        Some(crate::run::Metric::TestAccuracy) => ("avg. acc", "acc max"),
        _ => ("avg. loss", "max loss"),
    };
    let mut s = format!(
        "{:<10} {:>5} {:>5} {:>12} {:>12} {:>5} {:>9}\n",
        "Optimizer", "λa", "λs", avg, max, "runs", "diverged"
    );
    let cell = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"));
    for r in rows {
        s.push_str(&format!(
            "{:<10} {:>5} {:>5} {:>12} {:>12} {:>5} {:>9}\n",
            r.label,
            r.lambda_a,
            r.lambda_s,
            cell(r.metric_avg),
            cell(r.metric_max),
            r.n_runs,
            r.n_diverged
        ));
    }
    s
}

pub fn write_dataset<W: Write>(mut out: W, data: &SyntheticDataset) -> Result<(), FormatError> {
    writeln!(out, "# seed: {}", data.seed())?;
    let mut w = csv::Writer::from_writer(&mut out);
    let mut header: Vec<String> = (0..data.features()).map(|i| format!("f{i}")).collect();
    header.push("label".into());
    w.write_record(&header)?;
    for i in 0..data.len() {
        let mut row: Vec<String> = data.input(i).iter().map(f64::to_string).collect();
        row.push(data.label(i).to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
