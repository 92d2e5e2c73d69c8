//! Trace recovery and deviation detection scored against ground truth.
//!
//! Deviation is the positive class throughout: a true positive is a
//! deviation that the alignment flags with a log move.

use serde::{Deserialize, Serialize};

use crate::align::Alignment;
use crate::error::{Error, Result};
use crate::petri::ActivityId;
use crate::problog::DetTrace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventClass {
    Normal,
    Deviation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveredTrace {
    pub case_id: String,
    pub activities: Vec<ActivityId>,
}

/// Per event, the activity assumed by the alignment's sync or log move.
pub fn recover(alignment: &Alignment, case_id: impl Into<String>) -> Result<RecoveredTrace> {
    let mut slots: Vec<Option<ActivityId>> = vec![None; alignment.event_count];
    for mv in alignment.moves.iter().filter(|m| m.kind.consumes_event()) {
        let (Some(e), Some(a)) = (mv.event, &mv.trace_label) else {
            return Err(Error::InvalidInput(format!("move {} has no event", mv.transition)));
        };
        slots[e] = Some(a.clone());
    }
    let activities = slots
        .into_iter()
        .enumerate()
        .map(|(i, a)| a.ok_or_else(|| Error::InvalidInput(format!("event {i} is not covered"))))
        .collect::<Result<_>>()?;
    Ok(RecoveredTrace { case_id: case_id.into(), activities })
}

/// Fraction of positions where the recovered activity equals the original one.
pub fn recovery_accuracy(recovered: &RecoveredTrace, original: &DetTrace) -> Result<f64> {
    let (left, right) = (recovered.activities.len(), original.len());
    if left != right {
        return Err(Error::LengthMismatch { left, right });
    }
    Ok(correct_positions(recovered, original) as f64 / right as f64)
}

pub(crate) fn correct_positions(recovered: &RecoveredTrace, original: &DetTrace) -> usize {
    recovered.activities.iter().zip(original.activities()).filter(|(a, b)| a == b).count()
}

/// Deviation for events taken by a log move, normal for synchronous ones.
pub fn classify_moves(alignment: &Alignment) -> Vec<EventClass> {
    use crate::builders::MoveKind;
    let mut out = vec![EventClass::Normal; alignment.event_count];
    for mv in &alignment.moves {
        if let (MoveKind::Log, Some(e)) = (mv.kind, mv.event) {
            out[e] = EventClass::Deviation;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl Confusion {
    pub fn tally(predictions: &[EventClass], truth: &[EventClass]) -> Result<Self> {
        if predictions.len() != truth.len() {
            return Err(Error::LengthMismatch { left: predictions.len(), right: truth.len() });
        }
        let mut c = Confusion::default();
        for (p, t) in predictions.iter().zip(truth) {
            match (p, t) {
                (EventClass::Deviation, EventClass::Deviation) => c.tp += 1,
                (EventClass::Deviation, EventClass::Normal) => c.fp += 1,
                (EventClass::Normal, EventClass::Normal) => c.tn += 1,
                (EventClass::Normal, EventClass::Deviation) => c.fn_ += 1,
            }
        }
        Ok(c)
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

impl std::ops::Add for Confusion {
    type Output = Confusion;

    fn add(self, o: Confusion) -> Confusion {
        Confusion { tp: self.tp + o.tp, fp: self.fp + o.fp, tn: self.tn + o.tn, fn_: self.fn_ + o.fn_ }
    }
}

impl std::iter::Sum for Confusion {
    fn sum<I: Iterator<Item = Confusion>>(iter: I) -> Self {
        iter.fold(Confusion::default(), |a, b| a + b)
    }
}

/// Which ratios had a zero denominator and were reported as 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Degenerate {
    pub accuracy: bool,
    pub f1: bool,
    pub sensitivity: bool,
    pub specificity: bool,
}

impl Degenerate {
    pub fn any(&self) -> bool {
        self.accuracy || self.f1 || self.sensitivity || self.specificity
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub counts: Confusion,
    pub accuracy: f64,
    pub f1: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub g_mean: f64,
    pub degenerate: Degenerate,
}

fn ratio(num: u64, den: u64, flag: &mut bool) -> f64 {
    if den == 0 {
        *flag = true;
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl EvalReport {
    pub fn from_counts(c: Confusion) -> Self {
        let mut d = Degenerate::default();
        let accuracy = ratio(c.tp + c.tn, c.total(), &mut d.accuracy);
        let f1 = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn_, &mut d.f1);
        let sensitivity = ratio(c.tp, c.tp + c.fn_, &mut d.sensitivity);
        let specificity = ratio(c.tn, c.tn + c.fp, &mut d.specificity);
        EvalReport {
            counts: c,
            accuracy,
            f1,
            sensitivity,
            specificity,
            g_mean: (sensitivity * specificity).sqrt(),
            degenerate: d,
        }
    }
}

pub fn score(predictions: &[EventClass], truth: &[EventClass]) -> Result<EvalReport> {
    Ok(EvalReport::from_counts(Confusion::tally(predictions, truth)?))
}
