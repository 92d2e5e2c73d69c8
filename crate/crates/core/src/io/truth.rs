//! Ground-truth sidecar written next to generated logs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::GroundTruth;

pub const TRUTH_VERSION: &str = "probalign-gt/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruthDocument {
    pub version: String,
    pub p_h: f64,
    pub seed: u64,
    pub t_d: f64,
    pub cases: Vec<GroundTruth>,
}

impl GroundTruthDocument {
    pub fn new(p_h: f64, seed: u64, t_d: f64, cases: Vec<GroundTruth>) -> Self {
        GroundTruthDocument { version: TRUTH_VERSION.to_string(), p_h, seed, t_d, cases }
    }

    pub fn case(&self, case_id: &str) -> Option<&GroundTruth> {
        self.cases.iter().find(|c| c.case_id == case_id)
    }
}

pub fn read_ground_truth(bytes: &[u8]) -> Result<GroundTruthDocument> {
    let doc: GroundTruthDocument = serde_json::from_slice(bytes)?;
    if doc.version != TRUTH_VERSION {
        return Err(Error::InvalidInput(format!("unsupported ground-truth version `{}`", doc.version)));
    }
    for case in &doc.cases {
        for (i, e) in case.events.iter().enumerate() {
            if !(e.event.p > 0.0 && e.event.p < 1.0) {
                return Err(Error::InvalidInput(format!(
                    "case `{}` event {i}: p {} is outside (0, 1)",
                    case.case_id, e.event.p
                )));
            }
        }
    }
    Ok(doc)
}

pub fn write_ground_truth(doc: &GroundTruthDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("ground truth always serializes");
    s.push('\n');
    s
}
