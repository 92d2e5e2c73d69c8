//! Probabilistic event logs: each event carries a categorical distribution
//! over activities. Deterministic traces are the probability-one special case.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::petri::ActivityId;

/// Default tolerance on the per-event probability sum.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Categorical distribution of one event over candidate activities.
///
/// Zero-probability candidates are dropped on construction, so every stored
/// probability is strictly positive.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbEvent {
    candidates: BTreeMap<ActivityId, f64>,
}

impl ProbEvent {
    /// Rejects NaN, negative or >1 probabilities and repeated activities.
    /// The sum is not checked here; see [`validate_log`].
    pub fn new(candidates: impl IntoIterator<Item = (ActivityId, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (activity, p) in candidates {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidLog(format!("probability {p} for `{activity}` is outside [0, 1]")));
            }
            if map.contains_key(&activity) {
                return Err(Error::InvalidLog(format!("activity `{activity}` listed twice")));
            }
            map.insert(activity, p);
        }
        map.retain(|_, p| *p > 0.0);
        if map.is_empty() {
            return Err(Error::InvalidLog("event has no candidate with positive probability".into()));
        }
        Ok(ProbEvent { candidates: map })
    }

    pub fn certain(activity: ActivityId) -> Self {
        ProbEvent { candidates: BTreeMap::from([(activity, 1.0)]) }
    }

    /// Candidates in lexicographic activity order.
    pub fn candidates(&self) -> impl Iterator<Item = (&ActivityId, f64)> {
        self.candidates.iter().map(|(a, &p)| (a, p))
    }

    pub fn probability(&self, activity: &ActivityId) -> f64 {
        self.candidates.get(activity).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.candidates.values().sum()
    }

    /// Most probable candidate; ties go to the lexicographically smallest name.
    pub fn argmax(&self) -> &ActivityId {
        let mut best: Option<(&ActivityId, f64)> = None;
        for (a, p) in self.candidates() {
            match best {
                Some((_, bp)) if p <= bp => {}
                _ => best = Some((a, p)),
            }
        }
        best.expect("events are never empty").0
    }

    pub fn renormalized(&self) -> ProbEvent {
        let total = self.sum();
        ProbEvent { candidates: self.candidates.iter().map(|(a, p)| (a.clone(), p / total)).collect() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbTrace {
    pub case_id: String,
    events: Vec<ProbEvent>,
}

impl ProbTrace {
    pub fn new(case_id: impl Into<String>, events: Vec<ProbEvent>) -> Result<Self> {
        if events.is_empty() {
            return Err(Error::EmptyTrace);
        }
        Ok(ProbTrace { case_id: case_id.into(), events })
    }

    pub fn events(&self) -> &[ProbEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn is_deterministic(&self) -> bool {
        self.events.iter().all(|e| e.len() == 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbEventLog {
    pub traces: Vec<ProbTrace>,
    pub activity_universe: BTreeSet<ActivityId>,
}

impl ProbEventLog {
    /// Log whose universe is exactly the set of candidate activities.
    pub fn from_traces(traces: Vec<ProbTrace>) -> Self {
        let activity_universe =
            traces.iter().flat_map(|t| t.events.iter()).flat_map(|e| e.candidates.keys().cloned()).collect();
        ProbEventLog { traces, activity_universe }
    }

    pub fn renormalized(&self) -> Self {
        let traces = self
            .traces
            .iter()
            .map(|t| ProbTrace {
                case_id: t.case_id.clone(),
                events: t.events.iter().map(ProbEvent::renormalized).collect(),
            })
            .collect();
        ProbEventLog { traces, activity_universe: self.activity_universe.clone() }
    }

    pub fn event_count(&self) -> usize {
        self.traces.iter().map(ProbTrace::len).sum()
    }
}

/// A trace of activities observed with certainty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetTrace {
    pub case_id: String,
    activities: Vec<ActivityId>,
}

impl DetTrace {
    pub fn new(case_id: impl Into<String>, activities: Vec<ActivityId>) -> Result<Self> {
        if activities.is_empty() {
            return Err(Error::EmptyTrace);
        }
        Ok(DetTrace { case_id: case_id.into(), activities })
    }

    pub fn activities(&self) -> &[ActivityId] {
        &self.activities
    }

    pub fn len(&self) -> usize {
        self.activities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.activities.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LogViolation {
    SumViolation { case_id: String, event: usize, sum: f64 },
    ProbabilityOutOfRange { case_id: String, event: usize, activity: ActivityId, probability: f64 },
    UnknownActivity { case_id: String, event: usize, activity: ActivityId },
}

impl fmt::Display for LogViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogViolation::SumViolation { case_id, event, sum } => {
                write!(f, "case `{case_id}` event {event}: probabilities sum to {sum}")
            }
            LogViolation::ProbabilityOutOfRange { case_id, event, activity, probability } => write!(
                f,
                "case `{case_id}` event {event}: probability {probability} of `{activity}` outside (0, 1]"
            ),
            LogViolation::UnknownActivity { case_id, event, activity } => {
                write!(f, "case `{case_id}` event {event}: `{activity}` is not in the activity universe")
            }
        }
    }
}

pub fn validate_log(log: &ProbEventLog, tol: f64) -> Vec<LogViolation> {
    let mut out = Vec::new();
    for trace in &log.traces {
        for (i, event) in trace.events.iter().enumerate() {
            for (a, p) in event.candidates() {
                if !(p > 0.0 && p <= 1.0) {
                    out.push(LogViolation::ProbabilityOutOfRange {
                        case_id: trace.case_id.clone(),
                        event: i,
                        activity: a.clone(),
                        probability: p,
                    });
                }
                if !log.activity_universe.contains(a) {
                    out.push(LogViolation::UnknownActivity {
                        case_id: trace.case_id.clone(),
                        event: i,
                        activity: a.clone(),
                    });
                }
            }
            let sum = event.sum();
            if (sum - 1.0).abs() > tol {
                out.push(LogViolation::SumViolation { case_id: trace.case_id.clone(), event: i, sum });
            }
        }
    }
    out
}

/// Most probable activity per event.
pub fn argmax_trace(trace: &ProbTrace) -> DetTrace {
    DetTrace {
        case_id: trace.case_id.clone(),
        activities: trace.events.iter().map(|e| e.argmax().clone()).collect(),
    }
}

pub fn lift_deterministic(trace: &DetTrace) -> Result<ProbTrace> {
    ProbTrace::new(trace.case_id.clone(), trace.activities.iter().cloned().map(ProbEvent::certain).collect())
}
