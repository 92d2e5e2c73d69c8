//! Metric rows as CSV with a fixed column order and six decimals.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::eval::EvalReport;

pub const REPORT_COLUMNS: [&str; 9] =
    ["epsilon", "t_d", "algorithm", "accuracy", "f1", "sensitivity", "specificity", "g_mean", "runtime_s"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    /// Empty for the unit-cost algorithm.
    pub epsilon: Option<f64>,
    /// Empty when no deviation threshold applies.
    pub t_d: Option<f64>,
    pub algorithm: String,
    pub accuracy: f64,
    pub f1: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub g_mean: f64,
    pub runtime_s: f64,
}

impl ReportRow {
    pub fn new(
        epsilon: Option<f64>,
        t_d: Option<f64>,
        algorithm: impl Into<String>,
        report: &EvalReport,
        runtime_s: f64,
    ) -> Self {
        ReportRow {
            epsilon,
            t_d,
            algorithm: algorithm.into(),
            accuracy: report.accuracy,
            f1: report.f1,
            sensitivity: report.sensitivity,
            specificity: report.specificity,
            g_mean: report.g_mean,
            runtime_s,
        }
    }
}

fn fixed(x: f64) -> String {
    format!("{x:.6}")
}

pub fn write_report_csv(rows: &[ReportRow]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(REPORT_COLUMNS).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.epsilon.map(fixed).unwrap_or_default(),
            r.t_d.map(fixed).unwrap_or_default(),
            r.algorithm.clone(),
            fixed(r.accuracy),
            fixed(r.f1),
            fixed(r.sensitivity),
            fixed(r.specificity),
            fixed(r.g_mean),
            fixed(r.runtime_s),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

pub fn read_report_csv(bytes: &[u8]) -> Result<Vec<ReportRow>> {
    let mut reader = csv::Reader::from_reader(bytes);
    let header = reader.headers()?.clone();
    if header.iter().ne(REPORT_COLUMNS) {
        return Err(crate::Error::parse("row 1", "unexpected report columns"));
    }
    reader.deserialize().map(|r| r.map_err(crate::Error::from)).collect()
}
