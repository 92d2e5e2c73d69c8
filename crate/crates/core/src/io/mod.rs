//! File codecs. Readers reject malformed input; writers are deterministic.
//!
//! | extension       | content                                   |
//! |-----------------|-------------------------------------------|
//! | `.pnml`         | Petri net                                 |
//! | `.problog.json` | probabilistic log, all cases              |
//! | `.problog.csv`  | one case, activity rows by event columns  |
//! | `.gt.json`      | ground truth of a generated log           |
//! | `.align.json`   | alignments with recovery and predictions  |
//! | `.report.csv`   | metric rows                               |

mod alignment;
mod log;
mod pnml;
mod report;
mod truth;

use std::path::Path;

pub use alignment::{
    read_alignment_document, write_alignment_document, AlignmentDocument, CaseResult, ErrorRow, MoveRow,
    StatsRow, ALIGN_VERSION,
};
pub use log::{
    read_det_log_json, read_prob_log_json, read_prob_trace_csv, write_det_log_json, write_prob_log_json,
    write_prob_trace_csv, write_traces_json, ReadOptions, PROBLOG_VERSION,
};
pub use pnml::{read_pnml, write_pnml};
pub use report::{read_report_csv, write_report_csv, ReportRow, REPORT_COLUMNS};
pub use truth::{read_ground_truth, write_ground_truth, GroundTruthDocument, TRUTH_VERSION};

use crate::error::{Error, Result};
use crate::petri::PetriNet;
use crate::problog::{ProbEventLog, ProbTrace};

pub fn read_pnml_file(path: &Path) -> Result<PetriNet> {
    read_pnml(&std::fs::read(path)?)
}

/// Case id of a per-case CSV: the file name up to its first dot.
pub fn case_id_from_path(path: &Path) -> Result<String> {
    path.file_name()
        .and_then(|n| n.to_str())
        .and_then(|n| n.split('.').next())
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .ok_or_else(|| Error::InvalidInput(format!("cannot derive a case id from {}", path.display())))
}

/// Read a log from a `.json` file, a `.csv` file, or a directory of `.csv`
/// files (one case each, in file-name order).
pub fn read_prob_log_path(path: &Path, opts: &ReadOptions) -> Result<ProbEventLog> {
    if path.is_dir() {
        let mut files: Vec<_> =
            std::fs::read_dir(path)?.map(|e| e.map(|e| e.path())).collect::<std::io::Result<_>>()?;
        files.retain(|p| p.extension().is_some_and(|e| e == "csv"));
        files.sort();
        if files.is_empty() {
            return Err(Error::InvalidInput(format!("no .csv files in {}", path.display())));
        }
        let mut traces: Vec<ProbTrace> = Vec::with_capacity(files.len());
        for f in &files {
            let log = read_prob_trace_csv(&std::fs::read(f)?, &case_id_from_path(f)?, opts)?;
            traces.extend(log.traces);
        }
        let mut seen = std::collections::BTreeSet::new();
        if let Some(dup) = traces.iter().find(|t| !seen.insert(t.case_id.as_str())) {
            return Err(Error::InvalidLog(format!("case `{}` appears twice", dup.case_id)));
        }
        return Ok(ProbEventLog::from_traces(traces));
    }
    let bytes = std::fs::read(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => read_prob_trace_csv(&bytes, &case_id_from_path(path)?, opts),
        Some("json") => read_prob_log_json(&bytes, opts),
        _ => Err(Error::InvalidInput(format!("{}: expected a .json or .csv log", path.display()))),
    }
}
