//! Alignment results as JSON, one entry per case.
//!
//! Floats keep full precision. Search timings are left out so that equal
//! inputs give byte-identical documents.

use serde::{Deserialize, Serialize};

use crate::align::{Alignment, CostFunction};
use crate::builders::MoveKind;
use crate::error::{Error, Result};
use crate::eval::{classify_moves, recover, EventClass};

pub const ALIGN_VERSION: &str = "probalign-align/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoveRow {
    pub transition: String,
    pub kind: MoveKind,
    /// `null` for a skip on the model side; `"τ"` for a silent transition.
    pub model_label: Option<String>,
    pub trace_label: Option<String>,
    pub event: Option<usize>,
    pub weight: f64,
    pub cost: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsRow {
    pub expanded: u64,
    pub generated: u64,
    pub queue_peak: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub kind: String,
    pub message: String,
}

impl From<&Error> for ErrorRow {
    fn from(e: &Error) -> Self {
        ErrorRow { kind: e.kind().to_string(), message: e.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CaseResult {
    Ok {
        case_id: String,
        total_cost: f64,
        moves: Vec<MoveRow>,
        stats: StatsRow,
        recovered: Vec<String>,
        predictions: Vec<EventClass>,
    },
    Error {
        case_id: String,
        error: ErrorRow,
    },
}

impl CaseResult {
    pub fn from_alignment(case_id: impl Into<String>, a: &Alignment) -> Result<Self> {
        let case_id = case_id.into();
        let recovered = recover(a, case_id.clone())?.activities.iter().map(ToString::to_string).collect();
        Ok(CaseResult::Ok {
            total_cost: a.total_cost,
            moves: a
                .moves
                .iter()
                .map(|m| MoveRow {
                    transition: m.transition.clone(),
                    kind: m.kind,
                    model_label: m.model_label.as_ref().map(ToString::to_string),
                    trace_label: m.trace_label.as_ref().map(ToString::to_string),
                    event: m.event,
                    weight: m.weight,
                    cost: m.cost,
                })
                .collect(),
            stats: StatsRow {
                expanded: a.stats.expanded,
                generated: a.stats.generated,
                queue_peak: a.stats.queue_peak,
            },
            recovered,
            predictions: classify_moves(a),
            case_id,
        })
    }

    pub fn failed(case_id: impl Into<String>, error: &Error) -> Self {
        CaseResult::Error { case_id: case_id.into(), error: error.into() }
    }

    pub fn case_id(&self) -> &str {
        match self {
            CaseResult::Ok { case_id, .. } | CaseResult::Error { case_id, .. } => case_id,
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self, CaseResult::Ok { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlignmentDocument {
    pub version: String,
    pub algorithm: String,
    pub cost_function: CostFunction,
    pub cases: Vec<CaseResult>,
}

impl AlignmentDocument {
    pub fn new(algorithm: impl Into<String>, cost_function: CostFunction, cases: Vec<CaseResult>) -> Self {
        AlignmentDocument {
            version: ALIGN_VERSION.to_string(),
            algorithm: algorithm.into(),
            cost_function,
            cases,
        }
    }

    pub fn failures(&self) -> usize {
        self.cases.iter().filter(|c| !c.is_ok()).count()
    }
}

pub fn write_alignment_document(doc: &AlignmentDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("alignment documents always serialize");
    s.push('\n');
    s
}

pub fn read_alignment_document(bytes: &[u8]) -> Result<AlignmentDocument> {
    let doc: AlignmentDocument = serde_json::from_slice(bytes)?;
    if doc.version != ALIGN_VERSION {
        return Err(Error::InvalidInput(format!("unsupported alignment version `{}`", doc.version)));
    }
    Ok(doc)
}
